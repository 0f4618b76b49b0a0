/*
 * Copyright 2026 the cavks authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include "cavks/field_ops.hpp"
#include "cavks/grid.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace cavks {

/// Density grid file (ASCII):
///   line 1: free-form comment
///   line 2: dims nx ny nz
///   line 3: spacing h_bohr
///   line 4: origin ox oy oz
///   then one value per line, x-fastest, 17 significant digits.
void write_density_grid(const std::filesystem::path& path, const ScalarField& f,
                        std::string_view comment);

/// Reads a density grid file; rejects malformed headers and any mismatch
/// between the declared dims and the number of value lines.
ScalarField read_density_grid(const std::filesystem::path& path);

/// CSV with a header row, comma separator, full double precision.
void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_line_cut_csv(const std::filesystem::path& path, const LineCut& cut);

} // namespace cavks

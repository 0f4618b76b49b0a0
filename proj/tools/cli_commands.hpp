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

#include "cavks/config.hpp"

#include <filesystem>
#include <functional>
#include <optional>

namespace cavks::cli {

struct Context {
  std::filesystem::path out_dir = ".";
  bool force = false;                        // override the Poisson boundary check
  std::optional<std::uint64_t> seed_override; // --seed beats the config key
};

// Exit codes: 0 success, 1 numerical failure, 2 usage/config error.
inline constexpr int exit_ok = 0;
inline constexpr int exit_numerical = 1;
inline constexpr int exit_usage = 2;

/// Runs `body`, mapping ConfigError -> 2 and NumericalError -> 1.
int guarded(const std::function<int()>& body);

int cmd_scf(const RunConfig& config, const Context& ctx);
int cmd_oracle(const RunConfig& config, const Context& ctx);
int cmd_calibrate(const RunConfig& config, const Context& ctx);
int cmd_compare(const std::filesystem::path& a_in,
                const std::filesystem::path& a_out,
                const std::filesystem::path& b_in,
                const std::filesystem::path& b_out, const Context& ctx);
int cmd_deltarho(const std::filesystem::path& rho_in,
                 const std::filesystem::path& rho_out, const Context& ctx);

} // namespace cavks::cli

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

#include "cavks/grid_io.hpp"

#include "cavks/errors.hpp"

#include <fmt/core.h>
#include <fmt/os.h>

#include <fstream>
#include <sstream>

namespace cavks {

void write_density_grid(const std::filesystem::path& path, const ScalarField& f,
                        std::string_view comment) {
  auto out = fmt::output_file(path.string());
  out.print("{}\n", comment);
  const Grid& g = f.grid();
  out.print("dims {} {} {}\n", g.nx(), g.ny(), g.nz());
  out.print("spacing {:.17g}\n", g.spacing());
  out.print("origin {:.17g} {:.17g} {:.17g}\n", g.origin()[0], g.origin()[1],
            g.origin()[2]);
  for (double v : f.values()) out.print("{:.17g}\n", v);
}

ScalarField read_density_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(fmt::format("cannot open density grid file '{}'", path.string()));

  std::string comment;
  std::getline(in, comment);

  std::string line, keyword;
  std::array<int, 3> dims{};
  if (!std::getline(in, line))
    throw ConfigError(fmt::format("'{}': missing dims line", path.string()));
  {
    std::istringstream ss(line);
    if (!(ss >> keyword >> dims[0] >> dims[1] >> dims[2]) || keyword != "dims")
      throw ConfigError(fmt::format("'{}': malformed dims line '{}'",
                                    path.string(), line));
  }

  double spacing = 0.0;
  if (!std::getline(in, line))
    throw ConfigError(fmt::format("'{}': missing spacing line", path.string()));
  {
    std::istringstream ss(line);
    if (!(ss >> keyword >> spacing) || keyword != "spacing")
      throw ConfigError(fmt::format("'{}': malformed spacing line '{}'",
                                    path.string(), line));
  }

  std::array<double, 3> origin{};
  if (!std::getline(in, line))
    throw ConfigError(fmt::format("'{}': missing origin line", path.string()));
  {
    std::istringstream ss(line);
    if (!(ss >> keyword >> origin[0] >> origin[1] >> origin[2]) ||
        keyword != "origin")
      throw ConfigError(fmt::format("'{}': malformed origin line '{}'",
                                    path.string(), line));
  }

  Grid grid(dims, spacing, origin);
  std::vector<double> values;
  values.reserve(grid.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream ss(line);
    double v;
    if (!(ss >> v))
      throw ConfigError(fmt::format("'{}': malformed value line '{}'",
                                    path.string(), line));
    values.push_back(v);
    if (values.size() > grid.size())
      throw ConfigError(fmt::format(
          "'{}': more values than the declared {} grid points", path.string(),
          grid.size()));
  }
  if (values.size() != grid.size())
    throw ConfigError(fmt::format(
        "'{}': {} values but the header declares {} grid points",
        path.string(), values.size(), grid.size()));
  return ScalarField(grid, std::move(values));
}

void write_csv(const std::filesystem::path& path,
               const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  auto out = fmt::output_file(path.string());
  for (std::size_t i = 0; i < header.size(); ++i)
    out.print("{}{}", header[i], i + 1 < header.size() ? "," : "");
  out.print("\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      out.print("{:.17g}{}", row[i], i + 1 < row.size() ? "," : "");
    out.print("\n");
  }
}

void write_line_cut_csv(const std::filesystem::path& path, const LineCut& cut) {
  std::vector<std::vector<double>> rows;
  rows.reserve(cut.coordinate.size());
  for (std::size_t i = 0; i < cut.coordinate.size(); ++i)
    rows.push_back({cut.coordinate[i], cut.value[i]});
  write_csv(path, {"coordinate_bohr", "value"}, rows);
}

} // namespace cavks

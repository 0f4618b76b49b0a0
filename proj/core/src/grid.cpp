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

#include "cavks/grid.hpp"

#include "cavks/errors.hpp"
#include "cavks/log.hpp"

#include <algorithm>
#include <cmath>

namespace cavks {

Grid::Grid(std::array<int, 3> dims, double spacing, std::array<double, 3> origin)
    : dims_(dims), spacing_(spacing), origin_(origin) {
  if (!(spacing > 0.0))
    throw ConfigError("grid spacing must be positive");
  for (int d : dims)
    if (d < 8)
      throw ConfigError("grid needs at least 8 points per axis");
}

Grid Grid::centered(std::array<int, 3> dims, double spacing) {
  std::array<double, 3> origin;
  for (int a = 0; a < 3; ++a)
    origin[a] = -0.5 * dims[a] * spacing + 0.5 * spacing;
  return Grid(dims, spacing, origin);
}

Grid Grid::from_half_width(double half_width, double spacing) {
  if (!(half_width > 0.0) || !(spacing > 0.0))
    throw ConfigError("grid half width and spacing must be positive");
  const int n = static_cast<int>(std::lround(2.0 * half_width / spacing));
  return centered({n, n, n}, spacing);
}

int Grid::nearest_index(int axis, double x) const {
  const double t = (x - origin_[axis]) / spacing_;
  int i = static_cast<int>(std::floor(t + 0.5));
  if (i - t == 0.5) i -= 1; // exact half-way tie: prefer the lower index
  return std::clamp(i, 0, dims_[axis] - 1);
}

ScalarField::ScalarField(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ConfigError("scalar field value count does not match the grid");
}

ScalarField ScalarField::sampled(
    const Grid& grid, const std::function<double(double, double, double)>& f) {
  ScalarField out(grid);
  std::size_t idx = 0;
  for (int iz = 0; iz < grid.nz(); ++iz)
    for (int iy = 0; iy < grid.ny(); ++iy)
      for (int ix = 0; ix < grid.nx(); ++ix, ++idx)
        out[idx] = f(grid.coord(0, ix), grid.coord(1, iy), grid.coord(2, iz));
  return out;
}

double ScalarField::min_value() const {
  return *std::min_element(values_.begin(), values_.end());
}

double ScalarField::max_value() const {
  return *std::max_element(values_.begin(), values_.end());
}

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool ScalarField::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double v) { return std::isfinite(v); });
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
  if (grid_ != other.grid_)
    throw ConfigError("field arithmetic requires matching grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
  if (grid_ != other.grid_)
    throw ConfigError("field arithmetic requires matching grids");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

Direction::Direction(std::array<double, 3> components) : components_(components) {
  const double n = std::sqrt(components_[0] * components_[0] +
                             components_[1] * components_[1] +
                             components_[2] * components_[2]);
  if (!(n > 0.0) || !std::isfinite(n))
    throw ConfigError("direction vector must be nonzero and finite");
  if (std::abs(n - 1.0) > 1e-12) {
    log::warn("direction vector has norm {:.6g}; rescaling to a unit vector", n);
    for (double& c : components_) c /= n;
  }
}

} // namespace cavks

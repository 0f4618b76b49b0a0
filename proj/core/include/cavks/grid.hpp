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

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace cavks {

/// Uniform Cartesian grid with cubic cells. All lengths in Bohr.
///
/// The default construction is cell-centered on a box symmetric about the
/// coordinate origin: with n points per axis and spacing h the box spans
/// [-n*h/2, n*h/2] and the points sit at -n*h/2 + (i + 1/2)*h.
class Grid {
public:
  Grid(std::array<int, 3> dims, double spacing, std::array<double, 3> origin);

  /// Cell-centered grid symmetric about the origin.
  static Grid centered(std::array<int, 3> dims, double spacing);

  /// Cell-centered symmetric grid for a box of the given half width;
  /// the per-axis point count is round(2*half_width/spacing).
  static Grid from_half_width(double half_width, double spacing);

  const std::array<int, 3>& dims() const { return dims_; }
  int nx() const { return dims_[0]; }
  int ny() const { return dims_[1]; }
  int nz() const { return dims_[2]; }
  double spacing() const { return spacing_; }
  const std::array<double, 3>& origin() const { return origin_; }

  std::size_t size() const {
    return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
  }
  double cell_volume() const { return spacing_ * spacing_ * spacing_; }

  /// Physical coordinate of grid index i along `axis`.
  double coord(int axis, int i) const { return origin_[axis] + spacing_ * i; }

  std::array<double, 3> point(int ix, int iy, int iz) const {
    return {coord(0, ix), coord(1, iy), coord(2, iz)};
  }

  /// Linear index, x-fastest.
  std::size_t index(int ix, int iy, int iz) const {
    return static_cast<std::size_t>(ix) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(iy) +
                static_cast<std::size_t>(dims_[1]) * iz);
  }

  /// Index of the grid point nearest to coordinate x along `axis`
  /// (ties resolve to the lower index).
  int nearest_index(int axis, double x) const;

  bool operator==(const Grid& other) const {
    return dims_ == other.dims_ && spacing_ == other.spacing_ &&
           origin_ == other.origin_;
  }
  bool operator!=(const Grid& other) const { return !(*this == other); }

private:
  std::array<int, 3> dims_;
  double spacing_;
  std::array<double, 3> origin_;
};

/// Real scalar function sampled on a Grid, values stored x-fastest.
class ScalarField {
public:
  explicit ScalarField(Grid grid)
      : grid_(grid), values_(grid.size(), 0.0) {}
  ScalarField(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(int ix, int iy, int iz) const {
    return values_[grid_.index(ix, iy, iz)];
  }
  double& at(int ix, int iy, int iz) {
    return values_[grid_.index(ix, iy, iz)];
  }
  std::size_t size() const { return values_.size(); }

  /// Sample f(x, y, z) at every grid point.
  static ScalarField sampled(const Grid& grid,
                             const std::function<double(double, double, double)>& f);

  double min_value() const;
  double max_value() const;
  double max_abs() const;

  /// True if every value is finite.
  bool all_finite() const;

  ScalarField& operator+=(const ScalarField& other);
  ScalarField& operator-=(const ScalarField& other);
  ScalarField& operator*=(double s);

private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Unit vector in R^3. Non-unit input is rescaled (with a warning when the
/// deviation exceeds the construction tolerance of 1e-12).
class Direction {
public:
  explicit Direction(std::array<double, 3> components);
  Direction(double x, double y, double z) : Direction(std::array{x, y, z}) {}

  const std::array<double, 3>& components() const { return components_; }
  double operator[](int i) const { return components_[i]; }

  static Direction x() { return Direction(1.0, 0.0, 0.0); }
  static Direction y() { return Direction(0.0, 1.0, 0.0); }
  static Direction z() { return Direction(0.0, 0.0, 1.0); }

private:
  std::array<double, 3> components_;
};

} // namespace cavks

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

#include "cavks/grid.hpp"

#include <cmath>
#include <random>

namespace cavks::test {

inline ScalarField gaussian(const Grid& g, double sigma = 1.0,
                            std::array<double, 3> center = {0, 0, 0},
                            double amplitude = 1.0) {
  return ScalarField::sampled(g, [=](double x, double y, double z) {
    const double dx = x - center[0], dy = y - center[1], dz = z - center[2];
    return amplitude *
           std::exp(-(dx * dx + dy * dy + dz * dz) / (2.0 * sigma * sigma));
  });
}

inline ScalarField random_field(const Grid& g, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = dist(rng);
  return f;
}

inline double max_difference(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Max |f(ix,iy,iz) - f(mirrored along axis)|.
inline double parity_error(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx(); ++ix) {
        int jx = ix, jy = iy, jz = iz;
        if (axis == 0) jx = g.nx() - 1 - ix;
        if (axis == 1) jy = g.ny() - 1 - iy;
        if (axis == 2) jz = g.nz() - 1 - iz;
        m = std::max(m, std::abs(f.at(ix, iy, iz) - f.at(jx, jy, jz)));
      }
  return m;
}

/// Max |op output| over the interior (2 cells from each face), where the
/// zero-Dirichlet stencils are untouched by the boundary.
template <typename Fn>
double max_interior_error(const ScalarField& f, Fn&& reference) {
  const Grid& g = f.grid();
  double m = 0.0;
  for (int iz = 2; iz < g.nz() - 2; ++iz)
    for (int iy = 2; iy < g.ny() - 2; ++iy)
      for (int ix = 2; ix < g.nx() - 2; ++ix)
        m = std::max(m, std::abs(f.at(ix, iy, iz) -
                                 reference(g.coord(0, ix), g.coord(1, iy),
                                           g.coord(2, iz))));
  return m;
}

} // namespace cavks::test

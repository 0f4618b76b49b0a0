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

#include <complex>
#include <span>
#include <vector>

namespace cavks {

/// Discrete differential and integral operators on scalar fields.
///
/// All derivatives are 4th-order central finite differences with
/// zero-Dirichlet boundaries (the field is taken to vanish outside the box).

/// nabla^2 f, summed per axis in x, y, z order.
ScalarField laplacian(const ScalarField& f);

/// (eps . nabla)^2 f = eps_i eps_j d_i d_j f. Pure second differences on-axis;
/// off-axis terms compose two antisymmetric first-difference stencils.
/// Reduces bit-for-bit to the single-axis second difference for axis-aligned
/// eps.
ScalarField directional_second_derivative(const ScalarField& f,
                                          const Direction& eps);

/// Riemann sum h^3 * sum(values) accumulated in index order so results are
/// bit-reproducible.
double integrate(const ScalarField& f);

double inner_product(const ScalarField& a, const ScalarField& b);

struct LineCut {
  int axis = 0;
  std::vector<double> coordinate;
  std::vector<double> value;
};

/// Grid-point values along a line parallel to `axis`. `offsets` are the fixed
/// coordinates of the two remaining axes in increasing axis order; they must
/// coincide with grid coordinates (no interpolation).
LineCut line_cut(const ScalarField& f, int axis, std::array<double, 2> offsets);

/// Restrict f to the points of a commensurate coarse grid by direct sampling.
/// Every coarse point must coincide with a fine point; otherwise the
/// restriction is rejected.
ScalarField restrict_to(const ScalarField& f, const Grid& coarse);

/// Coarse grid made of every `factor`-th point of `grid`, centered so a
/// symmetric grid stays symmetric. `factor` must be odd and divide the point
/// count on each axis.
Grid decimate_grid(const Grid& grid, int factor);

// Low-level stencil kernels shared with the Hamiltonian appliers. They act on
// raw x-fastest arrays and accumulate `scale * stencil(in)` into `out`.
namespace stencil {
void add_second_derivative(const Grid& g, std::span<const double> in,
                           std::span<double> out, int axis, double scale);
void add_first_derivative(const Grid& g, std::span<const double> in,
                          std::span<double> out, int axis, double scale);
void add_first_derivative(const Grid& g, std::span<const std::complex<double>> in,
                          std::span<std::complex<double>> out, int axis,
                          double scale);
void add_second_derivative(const Grid& g, std::span<const std::complex<double>> in,
                           std::span<std::complex<double>> out, int axis,
                           double scale);
/// First derivative with a complex prefactor (e.g. the -i of the current
/// operator folded into the stencil).
void add_first_derivative_scaled(const Grid& g,
                                 std::span<const std::complex<double>> in,
                                 std::span<std::complex<double>> out, int axis,
                                 std::complex<double> scale);
} // namespace stencil

} // namespace cavks

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

#include "cavks/field_ops.hpp"

#include "cavks/errors.hpp"

#include <fmt/core.h>

#include <cmath>
#include <cstdlib>

namespace cavks {

namespace {

// 4th-order central coefficients: f'' ~ (-1, 16, -30, 16, -1)/(12 h^2),
// f' ~ (1, -8, 0, 8, -1)/(12 h) on offsets (-2, -1, 0, 1, 2).
template <typename T>
void add_d2_impl(const Grid& g, const T* in, T* out, int axis, double scale) {
  const double w0 = scale * (-30.0) / (12.0 * g.spacing() * g.spacing());
  const double w1 = scale * 16.0 / (12.0 * g.spacing() * g.spacing());
  const double w2 = scale * (-1.0) / (12.0 * g.spacing() * g.spacing());
  const int n[3] = {g.nx(), g.ny(), g.nz()};
  const std::ptrdiff_t strides[3] = {
      1, n[0], static_cast<std::ptrdiff_t>(n[0]) * n[1]};
  const std::ptrdiff_t s = strides[axis];
  const int na = n[axis];
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;

  for (int ic = 0; ic < n[c]; ++ic)
    for (int ib = 0; ib < n[b]; ++ib) {
      const std::ptrdiff_t base = strides[b] * ib + strides[c] * ic;
      const T* p = in + base;
      T* q = out + base;
      for (int i = 0; i < 2; ++i) {
        T acc = w0 * p[s * i] + w1 * p[s * (i + 1)] + w2 * p[s * (i + 2)];
        if (i >= 1) acc += w1 * p[s * (i - 1)];
        q[s * i] += acc;
      }
      for (int i = 2; i < na - 2; ++i) {
        q[s * i] += w0 * p[s * i] + w1 * (p[s * (i - 1)] + p[s * (i + 1)]) +
                    w2 * (p[s * (i - 2)] + p[s * (i + 2)]);
      }
      for (int i = std::max(2, na - 2); i < na; ++i) {
        T acc = w0 * p[s * i] + w1 * p[s * (i - 1)] + w2 * p[s * (i - 2)];
        if (i + 1 < na) acc += w1 * p[s * (i + 1)];
        q[s * i] += acc;
      }
    }
}

template <typename T, typename S>
void add_d1_impl(const Grid& g, const T* in, T* out, int axis, S scale) {
  const S w1 = scale * (8.0 / (12.0 * g.spacing()));
  const S w2 = scale * (-1.0 / (12.0 * g.spacing()));
  const int n[3] = {g.nx(), g.ny(), g.nz()};
  const std::ptrdiff_t strides[3] = {
      1, n[0], static_cast<std::ptrdiff_t>(n[0]) * n[1]};
  const std::ptrdiff_t s = strides[axis];
  const int na = n[axis];
  const int b = (axis + 1) % 3;
  const int c = (axis + 2) % 3;

  for (int ic = 0; ic < n[c]; ++ic)
    for (int ib = 0; ib < n[b]; ++ib) {
      const std::ptrdiff_t base = strides[b] * ib + strides[c] * ic;
      const T* p = in + base;
      T* q = out + base;
      for (int i = 0; i < 2; ++i) {
        T acc = w1 * p[s * (i + 1)] + w2 * p[s * (i + 2)];
        if (i >= 1) acc -= w1 * p[s * (i - 1)];
        q[s * i] += acc;
      }
      for (int i = 2; i < na - 2; ++i) {
        q[s * i] += w1 * (p[s * (i + 1)] - p[s * (i - 1)]) +
                    w2 * (p[s * (i + 2)] - p[s * (i - 2)]);
      }
      for (int i = std::max(2, na - 2); i < na; ++i) {
        T acc = -w1 * p[s * (i - 1)] - w2 * p[s * (i - 2)];
        if (i + 1 < na) acc += w1 * p[s * (i + 1)];
        q[s * i] += acc;
      }
    }
}

} // namespace

namespace stencil {

void add_second_derivative(const Grid& g, std::span<const double> in,
                           std::span<double> out, int axis, double scale) {
  add_d2_impl(g, in.data(), out.data(), axis, scale);
}
void add_first_derivative(const Grid& g, std::span<const double> in,
                          std::span<double> out, int axis, double scale) {
  add_d1_impl(g, in.data(), out.data(), axis, scale);
}
void add_second_derivative(const Grid& g,
                           std::span<const std::complex<double>> in,
                           std::span<std::complex<double>> out, int axis,
                           double scale) {
  add_d2_impl(g, in.data(), out.data(), axis, scale);
}
void add_first_derivative(const Grid& g,
                          std::span<const std::complex<double>> in,
                          std::span<std::complex<double>> out, int axis,
                          double scale) {
  add_d1_impl(g, in.data(), out.data(), axis, scale);
}
void add_first_derivative_scaled(const Grid& g,
                                 std::span<const std::complex<double>> in,
                                 std::span<std::complex<double>> out, int axis,
                                 std::complex<double> scale) {
  add_d1_impl(g, in.data(), out.data(), axis, scale);
}

} // namespace stencil

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid());
  for (int axis = 0; axis < 3; ++axis)
    stencil::add_second_derivative(f.grid(), f.values(), out.values(), axis, 1.0);
  return out;
}

ScalarField directional_second_derivative(const ScalarField& f,
                                          const Direction& eps) {
  const auto& e = eps.components();
  ScalarField out(f.grid());
  for (int axis = 0; axis < 3; ++axis) {
    const double w = e[axis] * e[axis];
    if (w != 0.0)
      stencil::add_second_derivative(f.grid(), f.values(), out.values(), axis, w);
  }
  ScalarField tmp(f.grid());
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const double w = 2.0 * e[a] * e[b];
    if (w == 0.0) continue;
    std::fill(tmp.values().begin(), tmp.values().end(), 0.0);
    stencil::add_first_derivative(f.grid(), f.values(), tmp.values(), a, 1.0);
    stencil::add_first_derivative(f.grid(), tmp.values(), out.values(), b, w);
  }
  return out;
}

double integrate(const ScalarField& f) {
  double s = 0.0;
  for (double v : f.values()) s += v;
  return f.grid().cell_volume() * s;
}

double inner_product(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid())
    throw ConfigError("inner product requires matching grids");
  double s = 0.0;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) s += av[i] * bv[i];
  return a.grid().cell_volume() * s;
}

namespace {

int offset_to_index(const Grid& g, int axis, double offset) {
  const double t = (offset - g.origin()[axis]) / g.spacing();
  const long i = std::lround(t);
  if (i < 0 || i >= g.dims()[axis] ||
      std::abs(g.coord(axis, static_cast<int>(i)) - offset) > 1e-9)
    throw ConfigError(fmt::format(
        "line cut offset {:.12g} does not lie on a grid point of axis {}",
        offset, axis));
  return static_cast<int>(i);
}

} // namespace

LineCut line_cut(const ScalarField& f, int axis, std::array<double, 2> offsets) {
  if (axis < 0 || axis > 2) throw ConfigError("line cut axis must be 0, 1 or 2");
  const Grid& g = f.grid();
  const int b = (axis == 0) ? 1 : 0;
  const int c = (axis == 2) ? 1 : 2;
  const int ib = offset_to_index(g, b, offsets[0]);
  const int ic = offset_to_index(g, c, offsets[1]);

  LineCut cut;
  cut.axis = axis;
  const int n = g.dims()[axis];
  cut.coordinate.reserve(n);
  cut.value.reserve(n);
  int idx[3];
  idx[b] = ib;
  idx[c] = ic;
  for (int i = 0; i < n; ++i) {
    idx[axis] = i;
    cut.coordinate.push_back(g.coord(axis, i));
    cut.value.push_back(f.at(idx[0], idx[1], idx[2]));
  }
  return cut;
}

ScalarField restrict_to(const ScalarField& f, const Grid& coarse) {
  const Grid& fine = f.grid();
  const long m = std::lround(coarse.spacing() / fine.spacing());
  if (m < 1 || std::abs(coarse.spacing() - m * fine.spacing()) > 1e-9 * fine.spacing())
    throw ConfigError(fmt::format(
        "grids are not commensurate: coarse spacing {:.12g} is not an integer "
        "multiple of fine spacing {:.12g}",
        coarse.spacing(), fine.spacing()));

  std::array<int, 3> start{};
  for (int a = 0; a < 3; ++a) {
    const double t = (coarse.origin()[a] - fine.origin()[a]) / fine.spacing();
    const long o = std::lround(t);
    const long last = o + static_cast<long>(coarse.dims()[a] - 1) * m;
    if (std::abs(t - o) > 1e-9 || o < 0 || last >= fine.dims()[a])
      throw ConfigError(fmt::format(
          "coarse grid points on axis {} do not all coincide with fine grid "
          "points (offset {:.12g} cells)",
          a, t));
    start[a] = static_cast<int>(o);
  }

  ScalarField out(coarse);
  std::size_t idx = 0;
  for (int iz = 0; iz < coarse.nz(); ++iz)
    for (int iy = 0; iy < coarse.ny(); ++iy)
      for (int ix = 0; ix < coarse.nx(); ++ix, ++idx)
        out[idx] = f.at(start[0] + static_cast<int>(m) * ix,
                        start[1] + static_cast<int>(m) * iy,
                        start[2] + static_cast<int>(m) * iz);
  return out;
}

Grid decimate_grid(const Grid& grid, int factor) {
  if (factor < 1 || factor % 2 == 0)
    throw ConfigError("decimation factor must be a positive odd integer");
  if (factor == 1) return grid;
  std::array<int, 3> dims{};
  for (int a = 0; a < 3; ++a) {
    if (grid.dims()[a] % factor != 0)
      throw ConfigError(fmt::format(
          "decimation factor {} does not divide the {}-point axis {}", factor,
          grid.dims()[a], a));
    dims[a] = grid.dims()[a] / factor;
  }
  const int offset = (factor - 1) / 2;
  std::array<double, 3> origin{};
  for (int a = 0; a < 3; ++a)
    origin[a] = grid.origin()[a] + offset * grid.spacing();
  return Grid(dims, grid.spacing() * factor, origin);
}

} // namespace cavks

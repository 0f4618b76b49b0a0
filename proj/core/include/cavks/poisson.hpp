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

#include <memory>

namespace cavks {

/// Free-space Poisson solver: given f, returns v with nabla^2 v = f and
/// v -> 0 at infinity.
///
/// Uses the Hockney method: discrete convolution with the free-space Green's
/// function -1/(4 pi |r - r'|) evaluated by FFT on a zero-padded box (padding
/// factor 2 per axis). The singular self-cell entry is the analytic average
/// of the Green's function over one cell.
///
/// Instances are immutable after construction; solves on distinct inputs may
/// run concurrently.
class PoissonSolver {
public:
  struct Options {
    int padding_factor = 2;
    /// Sources whose boundary-shell magnitude exceeds warn_boundary_ratio
    /// times the global maximum get a warning; beyond fail_boundary_ratio the
    /// solve refuses unless forced.
    double warn_boundary_ratio = 1e-6;
    double fail_boundary_ratio = 1e-3;
    bool verbose = false;
  };

  explicit PoissonSolver(const Grid& grid);
  PoissonSolver(const Grid& grid, Options options);
  ~PoissonSolver();

  PoissonSolver(const PoissonSolver&) = delete;
  PoissonSolver& operator=(const PoissonSolver&) = delete;

  const Grid& grid() const;

  /// max |f| on the outermost grid shell divided by max |f| overall
  /// (0 for an identically zero field).
  static double boundary_ratio(const ScalarField& f);

  ScalarField solve_free_space(const ScalarField& f, bool force = false) const;

  /// v_H = solve_free_space(-4 pi rho), Hartree atomic units.
  /// Densities with entries below -1e-12 are rejected.
  ScalarField hartree_potential(const ScalarField& rho, bool force = false) const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Average of 1/|r| over the unit cube centered at the origin (frozen from a
/// high-precision quadrature); the self-cell Green's function value for cell
/// size h is -h^2 * this / (4 pi) after multiplying by the cell volume.
inline constexpr double unit_cell_inv_r_average = 2.3800773639795535;

} // namespace cavks

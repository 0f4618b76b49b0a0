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

#include <span>
#include <vector>

namespace cavks {

struct EigenOptions {
  /// l2 residual norm ||H phi - eps phi|| required per returned pair.
  double tol = 1e-8;
  int max_iter = 500;
  /// Kinetic-shift preconditioner (T + shift)^-1 applied in the sine basis.
  double shift = 1.0;
  /// Extra block vectors beyond the requested pairs.
  int n_guard = 1;
  int max_pairs = 64;
};

struct EigenResult {
  std::vector<double> eigenvalues;     // ascending
  std::vector<ScalarField> orbitals;   // <phi_i|phi_j> = delta_ij (h^3 weight)
  std::vector<double> residuals;
  int iterations = 0;
};

/// Lowest k eigenpairs of H = -1/2 nabla^2 + v by block preconditioned
/// conjugate gradients (LOBPCG). Fully deterministic: the starting block is
/// built from Gaussian-enveloped monomials (or the supplied initial guess),
/// never from random numbers.
EigenResult lowest_eigenpairs(const ScalarField& v, int k,
                              const EigenOptions& options = {},
                              std::span<const ScalarField> initial_guess = {});

} // namespace cavks

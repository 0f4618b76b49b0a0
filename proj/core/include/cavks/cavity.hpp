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

#include <vector>

namespace cavks {

inline constexpr double hartree_in_ev = 27.211386245988;

/// Frequencies quoted in eV are converted to Hartree exactly once, at input.
double ev_to_hartree(double ev);

/// Cavity mode before dressing: bare frequency omega (Hartree), mode
/// strength lambda (a.u.), and polarization direction.
struct BareMode {
  double omega = 0.0;
  double lambda = 0.0;
  Direction epsilon = Direction::z();
};

/// Mode after absorbing the diamagnetic term:
/// omega_tilde^2 = omega^2 + n_electrons * lambda^2, lambda_tilde = lambda.
struct DressedMode {
  double omega_tilde = 0.0;
  double lambda_tilde = 0.0;
  Direction epsilon = Direction::z();
};

DressedMode dress(const BareMode& mode, int n_electrons);

std::vector<DressedMode> dress_all(const std::vector<BareMode>& modes,
                                   int n_electrons);

/// Diagnostic n_electrons * lambda_tilde^2 / omega_tilde^2 (the
/// proportionality constant of the collective coupling is taken as 1).
double collective_coupling(const DressedMode& mode, int n_electrons);

} // namespace cavks

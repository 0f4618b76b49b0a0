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

#include "cavks/cavity.hpp"
#include "cavks/grid.hpp"
#include "cavks/poisson.hpp"

#include <span>

namespace cavks {

/// Electron-electron exchange-correlation choice.
enum class XcChoice {
  none,
  slater_exchange_only,
  lda_pz81,
};

XcChoice xc_choice_from_string(std::string_view name);
std::string_view to_string(XcChoice choice);

/// Parameters of the photon-free electron-photon potential. eta_c = 1
/// recovers the bare exchange form (pxLDA); other values rescale it
/// (pxcLDA). Densities below density_floor are treated as zero before the
/// 2/3 power so tail noise does not feed the second derivative.
struct PxcParams {
  double eta_c = 1.0;
  double density_floor = 1e-12;
};

/// Pointwise v_xc for the given density. slater_exchange_only gives
/// v_x = -(3 rho / pi)^(1/3); lda_pz81 adds the Perdew-Zunger 1981
/// correlation potential (unpolarized branch). rho = 0 maps to 0.
ScalarField lda_xc_potential(const ScalarField& rho, XcChoice choice);

/// Scalar PZ81 correlation potential (unpolarized), exposed for tests.
double pz81_correlation_potential(double rho);

/// Right-hand side of the pxc Poisson equation:
///   -eta_c * sum_modes (2 pi^2 lt^2 / wt^2) (eps . nabla)^2 (3 rho / 8 pi)^(2/3)
ScalarField pxc_source(const ScalarField& rho, std::span<const DressedMode> modes,
                       const PxcParams& params);

/// v_pxc = free-space Poisson solution of pxc_source. eta_c = 1 is exactly
/// the pxLDA potential; other values give the renormalized pxcLDA form.
ScalarField pxc_potential(const ScalarField& rho,
                          std::span<const DressedMode> modes,
                          const PxcParams& params, const PoissonSolver& solver,
                          bool force = false);

} // namespace cavks

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
#include "cavks/errors.hpp"
#include "cavks/functionals.hpp"
#include "cavks/grid.hpp"
#include "cavks/poisson.hpp"

#include <span>
#include <vector>

namespace cavks {

/// Error-function-softened point charge: contributes
/// -Z erf(|r - R| / a) / |r - R| to the external potential.
struct Nucleus {
  std::array<double, 3> position{0.0, 0.0, 0.0};
  double charge = 1.0;
  double softening = 0.5; // a, in Bohr
};

struct SystemSpec {
  std::vector<Nucleus> nuclei;
  int n_electrons = 1;
  Grid grid;
  /// Hartree + electron xc on/off. Must be off in the one-electron mode.
  bool interactions_enabled = true;

  /// Closed shells (even electron count, occupation 2 per orbital) or the
  /// explicit one-electron mode with interactions disabled.
  void validate() const;
  int n_occupied() const { return n_electrons == 1 ? 1 : n_electrons / 2; }
  std::vector<double> occupations() const;
};

ScalarField external_potential(const SystemSpec& spec);

/// -1/2 nabla^2 phi + v phi.
ScalarField apply_hamiltonian(const ScalarField& phi, const ScalarField& v);

struct PotentialSet {
  ScalarField v_ext;
  ScalarField v_hartree;
  ScalarField v_xc;
  ScalarField v_pxc;
  ScalarField v_ks; // v_ext + v_hartree + v_xc + v_pxc, summed in that order
};

struct ScfHistoryEntry {
  int iter = 0;
  double density_change = 0.0;
  double eig_drift = 0.0; // NaN on the first cycle
};

/// Converged Kohn-Sham solution.
struct KSState {
  std::vector<ScalarField> orbitals; // <phi_i|phi_j> = delta_ij
  std::vector<double> occupations;
  ScalarField density;
  PotentialSet potentials; // the set the final orbitals were solved in
  std::vector<double> eigenvalues;
  std::vector<ScfHistoryEntry> scf_history;
};

enum class MixingKind { linear, pulay };

struct ScfOptions {
  MixingKind mixing = MixingKind::linear;
  double alpha = 0.3;
  int pulay_depth = 5;
  int max_iter = 200;
  double tol_density = 1e-7; // max |rho_new - rho_old|
  double tol_eig = 1e-7;     // max eigenvalue drift per cycle
  double eig_tol = 1e-8;     // eigensolver residual
  int eig_max_iter = 500;
  double eig_shift = 1.0;
  bool pxc_enabled = true;
  bool poisson_force = false; // override the free-space boundary check
  bool verbose = false;
};

class ScfNonConvergence : public NumericalError {
public:
  ScfNonConvergence(const std::string& what, std::vector<ScfHistoryEntry> h)
      : NumericalError(what), history(std::move(h)) {}
  std::vector<ScfHistoryEntry> history;
};

/// Self-consistent solution of -1/2 nabla^2 + v_ext + v_H + v_xc + v_pxc.
/// Modes are dressed internally with spec.n_electrons. The optional shared
/// Poisson solver (same grid) avoids re-planning across many runs.
KSState scf(const SystemSpec& spec, std::span<const BareMode> modes,
            const PxcParams& pxc, XcChoice xc, const ScfOptions& options = {},
            const PoissonSolver* shared_solver = nullptr);

} // namespace cavks

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

#include "cavks/kohn_sham.hpp"

#include "cavks/eigensolver.hpp"
#include "cavks/field_ops.hpp"
#include "cavks/log.hpp"

#include <Eigen/Dense>
#include <fmt/core.h>

#include <cmath>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>

namespace cavks {

void SystemSpec::validate() const {
  if (n_electrons < 1) throw ConfigError("system needs at least one electron");
  if (n_electrons == 1) {
    if (interactions_enabled)
      throw ConfigError(
          "the one-electron mode requires interactions (Hartree + xc) off");
  } else if (n_electrons % 2 != 0) {
    throw ConfigError(
        "only closed shells are supported: the electron count must be even "
        "(or exactly 1 with interactions off)");
  }
  for (const auto& nuc : nuclei)
    if (!(nuc.softening > 0.0))
      throw ConfigError("every nucleus needs a positive softening length");
}

std::vector<double> SystemSpec::occupations() const {
  if (n_electrons == 1) return {1.0};
  return std::vector<double>(n_occupied(), 2.0);
}

ScalarField external_potential(const SystemSpec& spec) {
  const double two_over_sqrt_pi = 2.0 / std::sqrt(std::numbers::pi);
  return ScalarField::sampled(spec.grid, [&](double x, double y, double z) {
    double v = 0.0;
    for (const auto& nuc : spec.nuclei) {
      const double dx = x - nuc.position[0];
      const double dy = y - nuc.position[1];
      const double dz = z - nuc.position[2];
      const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
      if (d < 1e-12)
        v -= nuc.charge * two_over_sqrt_pi / nuc.softening;
      else
        v -= nuc.charge * std::erf(d / nuc.softening) / d;
    }
    return v;
  });
}

ScalarField apply_hamiltonian(const ScalarField& phi, const ScalarField& v) {
  if (phi.grid() != v.grid())
    throw ConfigError("hamiltonian application requires matching grids");
  ScalarField out(phi.grid());
  for (int axis = 0; axis < 3; ++axis)
    stencil::add_second_derivative(phi.grid(), phi.values(), out.values(), axis,
                                   -0.5);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i] * phi[i];
  return out;
}

namespace {

ScalarField density_from_orbitals(const std::vector<ScalarField>& orbitals,
                                  const std::vector<double>& occupations) {
  ScalarField rho(orbitals.front().grid());
  for (std::size_t j = 0; j < orbitals.size(); ++j) {
    const auto& phi = orbitals[j];
    const double occ = occupations[j];
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += occ * phi[i] * phi[i];
  }
  return rho;
}

double max_abs_difference(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

// Clamp tiny negative excursions (Pulay extrapolation can undershoot) and
// rescale so the mixed density keeps the electron count.
void make_density_admissible(ScalarField& rho, double n_electrons) {
  for (double& v : rho.values())
    if (v < 0.0) v = 0.0;
  const double total = integrate(rho);
  if (total > 0.0) rho *= n_electrons / total;
}

class DensityMixer {
public:
  DensityMixer(MixingKind kind, double alpha, int depth)
      : kind_(kind), alpha_(alpha), depth_(std::max(1, depth)) {}

  ScalarField mix(const std::optional<ScalarField>& previous_input,
                  const ScalarField& output) {
    if (!previous_input) return output;
    if (kind_ == MixingKind::linear) {
      ScalarField mixed = *previous_input;
      for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] += alpha_ * (output[i] - mixed[i]);
      return mixed;
    }
    return pulay(*previous_input, output);
  }

private:
  ScalarField pulay(const ScalarField& input, const ScalarField& output) {
    inputs_.push_back(input);
    ScalarField res = output;
    res -= input;
    residuals_.push_back(std::move(res));
    while (static_cast<int>(inputs_.size()) > depth_) {
      inputs_.pop_front();
      residuals_.pop_front();
    }

    const int k = static_cast<int>(inputs_.size());
    if (k == 1) {
      ScalarField mixed = input;
      for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] += alpha_ * residuals_.back()[i];
      return mixed;
    }

    Eigen::MatrixXd a(k + 1, k + 1);
    a.setZero();
    for (int i = 0; i < k; ++i)
      for (int j = i; j < k; ++j) {
        double dot = 0.0;
        const auto& ri = residuals_[i].values();
        const auto& rj = residuals_[j].values();
        for (std::size_t p = 0; p < ri.size(); ++p) dot += ri[p] * rj[p];
        a(i, j) = a(j, i) = dot;
      }
    a.row(k).head(k).setConstant(1.0);
    a.col(k).head(k).setConstant(1.0);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k + 1);
    rhs[k] = 1.0;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) {
      // degenerate history: fall back to plain linear mixing
      ScalarField mixed = input;
      for (std::size_t i = 0; i < mixed.size(); ++i)
        mixed[i] += alpha_ * residuals_.back()[i];
      return mixed;
    }
    const Eigen::VectorXd c = lu.solve(rhs);

    ScalarField mixed(input.grid());
    for (int j = 0; j < k; ++j) {
      const auto& in_j = inputs_[j].values();
      const auto& re_j = residuals_[j].values();
      const double cj = c[j];
      for (std::size_t p = 0; p < mixed.size(); ++p)
        mixed[p] += cj * (in_j[p] + alpha_ * re_j[p]);
    }
    return mixed;
  }

  MixingKind kind_;
  double alpha_;
  int depth_;
  std::deque<ScalarField> inputs_;
  std::deque<ScalarField> residuals_;
};

} // namespace

KSState scf(const SystemSpec& spec, std::span<const BareMode> modes,
            const PxcParams& pxc, XcChoice xc, const ScfOptions& options,
            const PoissonSolver* shared_solver) {
  spec.validate();
  const Grid& grid = spec.grid;
  const int n_occ = spec.n_occupied();
  const auto occupations = spec.occupations();

  std::vector<DressedMode> dressed;
  for (const auto& m : modes) dressed.push_back(dress(m, spec.n_electrons));

  const bool need_pxc = options.pxc_enabled && !dressed.empty();
  const bool need_poisson = spec.interactions_enabled || need_pxc;
  std::unique_ptr<PoissonSolver> own_solver;
  const PoissonSolver* solver = shared_solver;
  if (need_poisson && !solver) {
    own_solver = std::make_unique<PoissonSolver>(grid);
    solver = own_solver.get();
  }
  if (solver && solver->grid() != grid)
    throw ConfigError("shared Poisson solver grid does not match the system grid");

  const ScalarField v_ext = external_potential(spec);

  auto build_potentials = [&](const std::optional<ScalarField>& rho) {
    PotentialSet pots{v_ext, ScalarField(grid), ScalarField(grid),
                      ScalarField(grid), ScalarField(grid)};
    if (rho) {
      if (spec.interactions_enabled) {
        pots.v_hartree = solver->hartree_potential(*rho, options.poisson_force);
        pots.v_xc = lda_xc_potential(*rho, xc);
      }
      if (need_pxc)
        pots.v_pxc =
            pxc_potential(*rho, dressed, pxc, *solver, options.poisson_force);
    }
    pots.v_ks = pots.v_ext;
    pots.v_ks += pots.v_hartree;
    pots.v_ks += pots.v_xc;
    pots.v_ks += pots.v_pxc;
    return pots;
  };

  EigenOptions eig_options;
  eig_options.tol = options.eig_tol;
  eig_options.max_iter = options.eig_max_iter;
  eig_options.shift = options.eig_shift;

  DensityMixer mixer(options.mixing, options.alpha, options.pulay_depth);
  std::optional<ScalarField> rho_mixed;
  std::optional<ScalarField> rho_prev;
  std::vector<double> eig_prev;
  std::vector<ScalarField> guess;
  std::vector<ScfHistoryEntry> history;

  for (int iter = 1; iter <= options.max_iter; ++iter) {
    PotentialSet pots = build_potentials(rho_mixed);
    EigenResult eig = lowest_eigenpairs(pots.v_ks, n_occ, eig_options, guess);

    ScalarField rho_out = density_from_orbitals(eig.orbitals, occupations);

    const double density_change =
        rho_prev ? max_abs_difference(rho_out, *rho_prev) : rho_out.max_abs();
    double eig_drift = std::numeric_limits<double>::quiet_NaN();
    if (!eig_prev.empty()) {
      eig_drift = 0.0;
      for (int j = 0; j < n_occ; ++j)
        eig_drift = std::max(eig_drift, std::abs(eig.eigenvalues[j] - eig_prev[j]));
    }
    history.push_back({iter, density_change, eig_drift});
    if (options.verbose)
      log::info("scf iter {:3d}: density change {:.3e}, eig drift {:.3e}, "
                "eps0 {:.10f} Ha",
                iter, density_change, eig_drift, eig.eigenvalues[0]);

    if (iter >= 2 && density_change < options.tol_density &&
        eig_drift < options.tol_eig) {
      KSState state{std::move(eig.orbitals),
                    occupations,
                    std::move(rho_out),
                    std::move(pots),
                    std::move(eig.eigenvalues),
                    std::move(history)};
      return state;
    }

    guess = eig.orbitals;
    eig_prev = eig.eigenvalues;
    rho_mixed = mixer.mix(rho_mixed, rho_out);
    make_density_admissible(*rho_mixed, spec.n_electrons);
    rho_prev = std::move(rho_out);
  }

  std::string message =
      fmt::format("scf did not converge within {} iterations "
                  "(last density change {:.3e}, eig drift {:.3e})",
                  options.max_iter, history.back().density_change,
                  history.back().eig_drift);
  throw ScfNonConvergence(std::move(message), std::move(history));
}

} // namespace cavks

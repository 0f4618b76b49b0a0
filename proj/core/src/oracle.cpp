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

#include "cavks/oracle.hpp"

#include "cavks/compare.hpp"
#include "cavks/field_ops.hpp"
#include "cavks/log.hpp"

#include <Eigen/Dense>
#include <fmt/core.h>

#include <cmath>
#include <cstdlib>
#include <limits>
#include <numbers>
#include <optional>
#include <random>

namespace cavks {

PFOperator::PFOperator(const ScalarField& v_ext, const DressedMode& mode,
                       int n_max)
    : space_dim_(v_ext.grid().size()),
      n_max_(n_max),
      omega_tilde_(mode.omega_tilde),
      coupling_(mode.lambda_tilde / std::sqrt(2.0 * mode.omega_tilde)) {
  if (n_max < 0) throw ConfigError("photon truncation n_max must be nonnegative");
  if (!(mode.omega_tilde > 0.0))
    throw ConfigError("dressed mode frequency must be positive");

  const Grid grid = v_ext.grid();
  const std::vector<double> v = v_ext.values();
  apply_hel_ = [grid, v](std::span<const Complex> in, std::span<Complex> out) {
    for (int axis = 0; axis < 3; ++axis)
      stencil::add_second_derivative(grid, in, out, axis, -0.5);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] += v[i] * in[i];
  };

  const auto eps = mode.epsilon.components();
  apply_d_ = [grid, eps](std::span<const Complex> in, std::span<Complex> out) {
    // D = -i (eps . nabla); the -i factor is folded into the stencil scale
    for (int axis = 0; axis < 3; ++axis)
      if (eps[axis] != 0.0)
        stencil::add_first_derivative_scaled(grid, in, out, axis,
                                             Complex(0.0, -eps[axis]));
  };
}

PFOperator::PFOperator(std::size_t space_dim, int n_max, double omega_tilde,
                       double coupling, BlockApply apply_hel, BlockApply apply_d)
    : space_dim_(space_dim),
      n_max_(n_max),
      omega_tilde_(omega_tilde),
      coupling_(coupling),
      apply_hel_(std::move(apply_hel)),
      apply_d_(std::move(apply_d)) {}

void PFOperator::matvec(std::span<const Complex> in,
                        std::span<Complex> out) const {
  if (in.size() != dim() || out.size() != dim())
    throw ConfigError(fmt::format(
        "pf matvec: vector length {} does not match grid x Fock dimension {}",
        in.size(), dim()));

  std::fill(out.begin(), out.end(), Complex(0.0, 0.0));
  const std::size_t ns = space_dim_;
  const int nb = n_max_ + 1;

  // current-operator images of every block, computed once
  std::vector<Complex> d_blocks;
  if (coupling_ != 0.0) {
    d_blocks.assign(in.size(), Complex(0.0, 0.0));
    for (int n = 0; n < nb; ++n)
      apply_d_(in.subspan(n * ns, ns), std::span(d_blocks).subspan(n * ns, ns));
  }

  for (int n = 0; n < nb; ++n) {
    auto out_n = out.subspan(n * ns, ns);
    apply_hel_(in.subspan(n * ns, ns), out_n);
    const double photon = omega_tilde_ * (n + 0.5);
    const Complex* in_n = in.data() + n * ns;
    for (std::size_t i = 0; i < ns; ++i) out_n[i] += photon * in_n[i];
    if (coupling_ != 0.0) {
      if (n >= 1) {
        const double w = coupling_ * std::sqrt(static_cast<double>(n));
        const Complex* d = d_blocks.data() + (n - 1) * ns;
        for (std::size_t i = 0; i < ns; ++i) out_n[i] += w * d[i];
      }
      if (n + 1 < nb) {
        const double w = coupling_ * std::sqrt(static_cast<double>(n + 1));
        const Complex* d = d_blocks.data() + (n + 1) * ns;
        for (std::size_t i = 0; i < ns; ++i) out_n[i] += w * d[i];
      }
    }
  }
}

void PFConfig::validate() const {
  if (spec.n_electrons != 1)
    throw ConfigError("the exact-diagonalization oracle is one-electron only");
  if (spec.interactions_enabled)
    throw ConfigError("the oracle requires interactions off");
  spec.validate();
  if (n_max < 1) throw ConfigError("oracle n_max must be at least 1");
  if (!(eig_tol > 0.0)) throw ConfigError("oracle eig_tol must be positive");
  if (max_basis < 8) throw ConfigError("oracle Lanczos basis cap is too small");
}

std::vector<Complex> pf_matvec(std::span<const Complex> psi, const PFConfig& cfg) {
  cfg.validate();
  const PFOperator op(external_potential(cfg.spec), cfg.mode, cfg.n_max);
  std::vector<Complex> out(op.dim());
  op.matvec(psi, out);
  return out;
}

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

// Deterministic standard normals from raw mt19937_64 bits (independent of
// library distribution internals).
class NormalSource {
public:
  explicit NormalSource(std::uint64_t seed) : rng_(seed) {}
  double operator()() {
    if (have_) {
      have_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_ = true;
    return r * std::cos(a);
  }

private:
  double uniform() { return (rng_() >> 11) * 0x1.0p-53; }
  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_ = false;
};

VectorXcd random_start(std::size_t n, NormalSource& normals) {
  VectorXcd v(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double re = normals();
    const double im = normals();
    v[i] = Complex(re, im);
  }
  v.normalize();
  return v;
}

struct LanczosOutcome {
  double theta = 0.0;
  VectorXcd vector;
  double residual = 0.0;
  int matvecs = 0;
};

/// Lowest eigenpair of a Hermitian operator by Lanczos with full
/// reorthogonalization against the retained basis; thick restart keeps the
/// lowest Ritz vectors when the basis hits `max_basis`. The basis lives in
/// one contiguous matrix so the orthogonalization runs as blocked GEMVs.
LanczosOutcome lanczos_ground_state(
    const std::function<void(const VectorXcd&, VectorXcd&)>& apply,
    std::size_t dim, double tol, std::uint64_t seed, int max_basis,
    int max_matvecs) {
  NormalSource normals(seed);
  max_basis = static_cast<int>(std::min<std::size_t>(max_basis, dim));
  const int keep = std::max(2, std::min(16, max_basis / 4));

  MatrixXcd basis(dim, max_basis);
  basis.col(0) = random_start(dim, normals);
  int nvec = 1;
  MatrixXcd proj = MatrixXcd::Zero(max_basis + 1, max_basis + 1);

  int j = 0;
  int matvecs = 0;
  VectorXcd u(dim), hy(dim);
  LanczosOutcome best;
  best.residual = std::numeric_limits<double>::infinity();

  // proj stays Hermitian by construction: every measured coefficient is
  // written to both (i, j) and (j, i). Off-diagonal pairs are measured
  // exactly once, when the later of the two columns is processed.
  auto record = [&](const VectorXcd& c) {
    for (int i = 0; i < nvec; ++i) {
      proj(i, j) += c(i);
      if (i != j) proj(j, i) += std::conj(c(i));
    }
  };
  // DGKS: orthogonalize a second time only when the first pass removed a
  // large fraction of the vector
  auto orthogonalize = [&](VectorXcd& v, bool accumulate) {
    const auto block = basis.leftCols(nvec);
    const double before = v.norm();
    VectorXcd c = block.adjoint() * v;
    v.noalias() -= block * c;
    if (accumulate) record(c);
    if (v.norm() < before / std::numbers::sqrt2) {
      c = block.adjoint() * v;
      v.noalias() -= block * c;
      if (accumulate) record(c);
    }
  };

  Eigen::SelfAdjointEigenSolver<MatrixXcd> es;
  int last_checked = -1;
  while (true) {
    apply(basis.col(j), u);
    ++matvecs;
    orthogonalize(u, true);
    const double beta = u.norm();

    const int nb = j + 1;
    const bool subspace_closed = beta < 1e-12;
    const bool full_space = static_cast<std::size_t>(nvec) == dim;
    const bool basis_full = nvec == max_basis;
    // the projected eigensolve costs O(nb^3); skip most iterations once the
    // basis is large, but never skip a decision point
    const bool check = nb <= 40 || nb % 5 == 0 || basis_full ||
                       subspace_closed || full_space ||
                       matvecs >= max_matvecs - 1;
    if (!check) {
      // the (j+1, j) coupling is measured when column j+1 is processed
      basis.col(nvec) = u / beta;
      ++nvec;
      ++j;
      continue;
    }

    MatrixXcd a = proj.topLeftCorner(nb, nb);
    a = (a + a.adjoint()) / 2.0;
    es.compute(a);
    const double theta = es.eigenvalues()(0);
    const VectorXcd s = es.eigenvectors().col(0);
    const double bound = beta * std::abs(s(nb - 1));
    last_checked = nb;
    if (std::getenv("CAVKS_LANCZOS_DEBUG"))
      fmt::print(stderr, "lanczos mv={} nb={} theta={:.12f} beta={:.3e} bound={:.3e}\n",
                 matvecs, nb, theta, beta, bound);

    if (bound < tol || subspace_closed || full_space ||
        matvecs >= max_matvecs) {
      VectorXcd y = basis.leftCols(nb) * s;
      y.normalize();
      apply(y, hy);
      ++matvecs;
      const double resid = (hy - theta * y).norm();
      if (std::getenv("CAVKS_LANCZOS_DEBUG"))
        fmt::print(stderr, "  true residual {:.3e} at theta {:.12f}\n", resid,
                   theta);
      if (resid < best.residual) {
        best.theta = theta;
        best.vector = y;
        best.residual = resid;
        best.matvecs = matvecs;
      }
      if (resid < tol) {
        best.matvecs = matvecs;
        return best;
      }
      if (full_space && resid < 1e3 * tol) {
        // the Krylov space is the whole space; this is as exact as the
        // projected solve gets
        best.matvecs = matvecs;
        return best;
      }
      if (matvecs >= max_matvecs)
        throw NumericalError(fmt::format(
            "lanczos did not reach residual {:.1e} within {} matvecs "
            "(best residual {:.3e})",
            tol, max_matvecs, best.residual));
    }

    if (basis_full) {
      // thick restart with the lowest `keep` Ritz vectors
      const int l = std::min(keep, nb);
      MatrixXcd fresh = basis.leftCols(nb) * es.eigenvectors().leftCols(l);
      // ritz vectors are orthonormal to roundoff; tidy them anyway
      for (int r = 0; r < l; ++r) {
        for (int q = 0; q < r; ++q)
          fresh.col(r) -= fresh.col(q).dot(fresh.col(r)) * fresh.col(q);
        fresh.col(r).normalize();
      }
      VectorXcd v_next = subspace_closed ? random_start(dim, normals)
                                         : VectorXcd(u / beta);
      basis.leftCols(l) = fresh;
      nvec = l;
      proj.setZero();
      for (int r = 0; r < l; ++r) proj(r, r) = es.eigenvalues()(r);
      j = l;
      orthogonalize(v_next, false);
      v_next.normalize();
      basis.col(l) = v_next;
      ++nvec;
      continue;
    }

    if (subspace_closed) {
      // invariant subspace (e.g. decoupled photon blocks): continue in a
      // fresh deterministic direction
      VectorXcd v_next = random_start(dim, normals);
      orthogonalize(v_next, false);
      v_next.normalize();
      basis.col(nvec) = v_next;
    } else {
      // the (j+1, j) coupling is measured when column j+1 is processed
      basis.col(nvec) = u / beta;
    }
    ++nvec;
    ++j;
  }
}

} // namespace

PFGroundState pf_ground_state(const PFOperator& op, const Grid& grid,
                              double eig_tol, std::uint64_t seed, int max_basis,
                              int max_matvecs) {
  if (grid.size() != op.space_dim())
    throw ConfigError("oracle grid does not match the operator's space dimension");
  const std::size_t dim = op.dim();

  auto apply = [&op](const VectorXcd& x, VectorXcd& y) {
    y.resize(x.size());
    op.matvec(std::span<const Complex>(x.data(), x.size()),
              std::span<Complex>(y.data(), y.size()));
  };

  LanczosOutcome out =
      lanczos_ground_state(apply, dim, eig_tol, seed, max_basis, max_matvecs);

  const double scale = 1.0 / std::sqrt(grid.cell_volume());

  PFGroundState state{out.theta,
                      std::vector<Complex>(dim),
                      ScalarField(grid),
                      out.residual,
                      out.matvecs};
  const std::size_t ns = op.space_dim();
  for (std::size_t i = 0; i < dim; ++i)
    state.wavefunction[i] = out.vector[i] * scale;
  for (int n = 0; n <= op.n_max(); ++n)
    for (std::size_t r = 0; r < ns; ++r)
      state.electron_density[r] += std::norm(state.wavefunction[n * ns + r]);
  return state;
}

PFGroundState pf_ground_state(const PFConfig& cfg) {
  cfg.validate();
  const ScalarField v_ext = external_potential(cfg.spec);
  const PFOperator op(v_ext, cfg.mode, cfg.n_max);
  return pf_ground_state(op, cfg.spec.grid, cfg.eig_tol, cfg.seed,
                         cfg.max_basis, cfg.max_matvecs);
}

std::vector<FockConvergenceRow> fock_convergence(const PFConfig& base,
                                                 std::span<const int> n_max_list) {
  if (n_max_list.empty())
    throw ConfigError("fock convergence needs at least one n_max");
  for (std::size_t i = 1; i < n_max_list.size(); ++i)
    if (n_max_list[i] <= n_max_list[i - 1])
      throw ConfigError("fock convergence n_max list must be strictly ascending");

  std::vector<FockConvergenceRow> rows;
  std::optional<ScalarField> prev_density;
  for (int n_max : n_max_list) {
    PFConfig cfg = base;
    cfg.n_max = n_max;
    PFGroundState gs = pf_ground_state(cfg);
    FockConvergenceRow row;
    row.n_max = n_max;
    row.energy = gs.energy;
    row.i_vs_prev = prev_density
                        ? i_metric(*prev_density, gs.electron_density)
                        : std::numeric_limits<double>::quiet_NaN();
    rows.push_back(row);
    log::info("oracle fock convergence: n_max {:2d}, E0 {:+.10f} Ha, "
              "I vs previous {:.3e}",
              row.n_max, row.energy, row.i_vs_prev);
    prev_density = std::move(gs.electron_density);
  }
  return rows;
}

} // namespace cavks

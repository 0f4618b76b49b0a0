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

#include "cavks/eigensolver.hpp"

#include "cavks/errors.hpp"
#include "cavks/field_ops.hpp"
#include "fftw_guard.hpp"

#include <Eigen/Dense>
#include <fftw3.h>
#include <fmt/core.h>

#include <cmath>
#include <numbers>

namespace cavks {

namespace {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

// Approximate inverse of (T + shift) with T = -1/2 nabla^2, applied in the
// 3D sine basis. The 5-point stencil is not exactly diagonal in that basis
// near the boundary, which is fine for a preconditioner.
class KineticShiftPreconditioner {
public:
  KineticShiftPreconditioner(const Grid& grid, double shift) : grid_(grid) {
    const auto& n = grid.dims();
    buf_.resize(grid.size());
    {
      std::scoped_lock lock(detail::fftw_planner_mutex());
      plan_ = fftw_plan_r2r_3d(n[2], n[1], n[0], buf_.data(), buf_.data(),
                               FFTW_RODFT00, FFTW_RODFT00, FFTW_RODFT00,
                               FFTW_ESTIMATE);
    }
    if (!plan_) throw NumericalError("FFTW sine-transform plan creation failed");

    const double h2 = grid.spacing() * grid.spacing();
    std::array<std::vector<double>, 3> axis_symbol;
    for (int a = 0; a < 3; ++a) {
      axis_symbol[a].resize(n[a]);
      for (int k = 0; k < n[a]; ++k) {
        const double th = std::numbers::pi * (k + 1) / (n[a] + 1);
        axis_symbol[a][k] =
            0.5 * (30.0 - 32.0 * std::cos(th) + 2.0 * std::cos(2.0 * th)) /
            (12.0 * h2);
      }
    }
    double norm = 1.0;
    for (int a = 0; a < 3; ++a) norm *= 2.0 * (n[a] + 1);
    inv_symbol_.resize(grid.size());
    std::size_t idx = 0;
    for (int kz = 0; kz < n[2]; ++kz)
      for (int ky = 0; ky < n[1]; ++ky)
        for (int kx = 0; kx < n[0]; ++kx, ++idx)
          inv_symbol_[idx] = 1.0 / ((axis_symbol[0][kx] + axis_symbol[1][ky] +
                                     axis_symbol[2][kz] + shift) *
                                    norm);
  }

  ~KineticShiftPreconditioner() {
    std::scoped_lock lock(detail::fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }

  KineticShiftPreconditioner(const KineticShiftPreconditioner&) = delete;
  KineticShiftPreconditioner& operator=(const KineticShiftPreconditioner&) = delete;

  void apply(const double* in, double* out) {
    std::copy(in, in + buf_.size(), buf_.data());
    fftw_execute_r2r(plan_, buf_.data(), buf_.data());
    for (std::size_t i = 0; i < buf_.size(); ++i) buf_[i] *= inv_symbol_[i];
    fftw_execute_r2r(plan_, buf_.data(), buf_.data());
    std::copy(buf_.data(), buf_.data() + buf_.size(), out);
  }

private:
  Grid grid_;
  std::vector<double> buf_;
  std::vector<double> inv_symbol_;
  fftw_plan plan_ = nullptr;
};

void apply_hamiltonian_raw(const Grid& g, const std::vector<double>& v,
                           const double* x, double* y) {
  const std::size_t n = g.size();
  std::fill(y, y + n, 0.0);
  std::span<const double> in(x, n);
  std::span<double> out(y, n);
  for (int axis = 0; axis < 3; ++axis)
    stencil::add_second_derivative(g, in, out, axis, -0.5);
  for (std::size_t i = 0; i < n; ++i) y[i] += v[i] * x[i];
}

// Gaussian-enveloped monomials centered on the box, enumerated by total
// degree. Definite parity per axis keeps symmetric problems symmetric.
Vec start_vector(const Grid& g, int index) {
  struct Exponents {
    int px, py, pz;
  };
  static auto make_exponents = [](int count) {
    std::vector<Exponents> e;
    for (int deg = 0; static_cast<int>(e.size()) < count; ++deg)
      for (int px = deg; px >= 0; --px)
        for (int py = deg - px; py >= 0; --py)
          e.push_back({px, py, deg - px - py});
    return e;
  };
  const auto exps = make_exponents(index + 1);
  const auto [px, py, pz] = exps[index];

  std::array<double, 3> center{};
  double extent = 1e30;
  for (int a = 0; a < 3; ++a) {
    center[a] = g.origin()[a] + 0.5 * (g.dims()[a] - 1) * g.spacing();
    extent = std::min(extent, g.dims()[a] * g.spacing());
  }
  const double sigma = extent / 6.0;

  Vec out(g.size());
  std::size_t idx = 0;
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx(); ++ix, ++idx) {
        const double x = g.coord(0, ix) - center[0];
        const double y = g.coord(1, iy) - center[1];
        const double z = g.coord(2, iz) - center[2];
        const double r2 = x * x + y * y + z * z;
        out[idx] = std::pow(x, px) * std::pow(y, py) * std::pow(z, pz) *
                   std::exp(-0.5 * r2 / (sigma * sigma));
      }
  return out;
}

// Modified Gram-Schmidt with one re-orthogonalization pass; drops columns
// whose remainder is below `drop_tol`. Returns the number of kept columns.
int orthonormalize(Mat& m, const Mat* against, double drop_tol = 1e-10) {
  int kept = 0;
  for (int j = 0; j < m.cols(); ++j) {
    Vec col = m.col(j);
    const double initial = col.norm();
    if (initial == 0.0) continue;
    for (int pass = 0; pass < 2; ++pass) {
      if (against)
        col -= (*against) * (against->transpose() * col);
      for (int i = 0; i < kept; ++i)
        col -= m.col(i).dot(col) * m.col(i);
    }
    const double nrm = col.norm();
    if (nrm < drop_tol * initial) continue;
    m.col(kept) = col / nrm;
    ++kept;
  }
  m.conservativeResize(Eigen::NoChange, kept);
  return kept;
}

} // namespace

EigenResult lowest_eigenpairs(const ScalarField& v, int k,
                              const EigenOptions& options,
                              std::span<const ScalarField> initial_guess) {
  const Grid& g = v.grid();
  const std::size_t n = g.size();
  if (k < 1) throw ConfigError("at least one eigenpair must be requested");
  if (k > options.max_pairs)
    throw ConfigError(fmt::format("requested {} eigenpairs, configured maximum is {}",
                                  k, options.max_pairs));

  const int m = std::min<long>(k + options.n_guard, static_cast<long>(n));
  KineticShiftPreconditioner precond(g, options.shift);

  auto apply_block = [&](const Mat& x) {
    Mat y(n, x.cols());
    for (int j = 0; j < x.cols(); ++j)
      apply_hamiltonian_raw(g, v.values(), x.col(j).data(), y.col(j).data());
    return y;
  };

  // starting block: supplied guess first, then the deterministic functions
  Mat X(n, m);
  int col = 0;
  for (const auto& f : initial_guess) {
    if (col >= m) break;
    if (f.grid() != g) throw ConfigError("initial guess grid mismatch");
    X.col(col++) = Eigen::Map<const Vec>(f.values().data(), n);
  }
  for (int gen = 0; col < m; ++gen) {
    X.col(col) = start_vector(g, gen);
    Mat head = X.leftCols(col + 1);
    if (orthonormalize(head, nullptr) == col + 1) {
      X.leftCols(col + 1) = head;
      ++col;
    }
  }
  if (orthonormalize(X, nullptr) < m)
    throw NumericalError("eigensolver could not build an independent start block");

  Mat HX = apply_block(X);
  Vec theta(m);
  {
    Mat G = X.transpose() * HX;
    Eigen::SelfAdjointEigenSolver<Mat> es((G + G.transpose()) / 2.0);
    X = X * es.eigenvectors();
    HX = HX * es.eigenvectors();
    theta = es.eigenvalues();
  }

  Mat P, HP;
  std::vector<double> residuals(m, 0.0);
  int iter = 0;
  for (iter = 1; iter <= options.max_iter; ++iter) {
    Mat R = HX - X * theta.asDiagonal();
    bool done = true;
    for (int j = 0; j < m; ++j) {
      residuals[j] = R.col(j).norm();
      if (j < k && residuals[j] >= options.tol) done = false;
    }
    if (done) break;

    Mat W(n, m);
    for (int j = 0; j < m; ++j)
      precond.apply(R.col(j).data(), W.col(j).data());
    const int nw = orthonormalize(W, &X);
    if (nw == 0)
      throw NumericalError("eigensolver stalled: preconditioned residuals are "
                           "linearly dependent on the current block");

    int np = 0;
    if (P.cols() > 0) {
      Mat XW(n, m + nw);
      XW.leftCols(m) = X;
      XW.rightCols(nw) = W;
      np = orthonormalize(P, &XW);
    }

    Mat S(n, m + nw + np);
    S.leftCols(m) = X;
    S.middleCols(m, nw) = W;
    if (np > 0) S.rightCols(np) = P;
    Mat HS(n, S.cols());
    HS.leftCols(m) = HX;
    HS.middleCols(m, nw) = apply_block(W);
    // the re-orthonormalization of P invalidated HP, so recompute
    if (np > 0) HS.rightCols(np) = apply_block(P);

    Mat A = S.transpose() * HS;
    Eigen::SelfAdjointEigenSolver<Mat> es((A + A.transpose()) / 2.0);
    const Mat C = es.eigenvectors().leftCols(m);
    theta = es.eigenvalues().head(m);

    Mat Cp = C;
    Cp.topRows(m).setZero();
    P = S * Cp;
    HP = HS * Cp;
    X = S * C;
    HX = HS * C;
  }

  if (iter > options.max_iter) {
    std::string worst;
    for (int j = 0; j < k; ++j)
      worst += fmt::format("{}{:.3e}", j ? ", " : "", residuals[j]);
    throw NumericalError(fmt::format(
        "eigensolver did not reach residual {:.1e} within {} iterations "
        "(residuals: {})",
        options.tol, options.max_iter, worst));
  }

  EigenResult result;
  result.iterations = iter;
  const double scale = 1.0 / std::sqrt(g.cell_volume());
  for (int j = 0; j < k; ++j) {
    result.eigenvalues.push_back(theta[j]);
    result.residuals.push_back(residuals[j]);
    ScalarField orb(g);
    for (std::size_t i = 0; i < n; ++i) orb[i] = X(i, j) * scale;
    result.orbitals.push_back(std::move(orb));
  }
  return result;
}

} // namespace cavks

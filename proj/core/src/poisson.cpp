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

#include "cavks/poisson.hpp"

#include "cavks/errors.hpp"
#include "cavks/log.hpp"
#include "fftw_guard.hpp"

#include <fftw3.h>
#include <fmt/core.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <vector>

namespace cavks {

namespace {

using detail::fftw_planner_mutex;

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};
template <typename T>
using FftwPtr = std::unique_ptr<T[], FftwDeleter>;

template <typename T>
FftwPtr<T> fftw_alloc_array(std::size_t n) {
  return FftwPtr<T>(static_cast<T*>(fftw_malloc(n * sizeof(T))));
}

} // namespace

struct PoissonSolver::Impl {
  Grid grid;
  Options options;
  std::array<int, 3> padded{}; // {x, y, z} point counts after padding
  std::size_t n_real = 0;      // padded real array size
  std::size_t n_cplx = 0;      // padded r2c spectrum size
  std::vector<std::complex<double>> kernel_hat;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  mutable std::atomic<bool> warned{false}; // soft warning emitted once per solver

  Impl(const Grid& g, Options opt) : grid(g), options(opt) {
    if (options.padding_factor < 2)
      throw ConfigError("free-space padding factor must be at least 2");
    for (int a = 0; a < 3; ++a)
      padded[a] = options.padding_factor * grid.dims()[a];
    n_real = static_cast<std::size_t>(padded[0]) * padded[1] * padded[2];
    n_cplx = static_cast<std::size_t>(padded[0] / 2 + 1) * padded[1] * padded[2];

    auto real_buf = fftw_alloc_array<double>(n_real);
    auto cplx_buf = fftw_alloc_array<fftw_complex>(n_cplx);
    {
      std::scoped_lock lock(fftw_planner_mutex());
      // x is the fastest index, so FFTW's row-major dims are (z, y, x)
      forward = fftw_plan_dft_r2c_3d(padded[2], padded[1], padded[0],
                                     real_buf.get(), cplx_buf.get(),
                                     FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_3d(padded[2], padded[1], padded[0],
                                      cplx_buf.get(), real_buf.get(),
                                      FFTW_ESTIMATE);
    }
    if (!forward || !backward)
      throw NumericalError("FFTW plan creation failed");

    build_kernel(real_buf.get(), cplx_buf.get());
  }

  ~Impl() {
    std::scoped_lock lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }

  void build_kernel(double* real_buf, fftw_complex* cplx_buf) {
    const double h = grid.spacing();
    const double vol = grid.cell_volume();
    const double self_cell = -h * h * unit_cell_inv_r_average /
                             (4.0 * std::numbers::pi);
    std::size_t idx = 0;
    for (int jz = 0; jz < padded[2]; ++jz) {
      const long dz = jz <= padded[2] / 2 ? jz : jz - padded[2];
      for (int jy = 0; jy < padded[1]; ++jy) {
        const long dy = jy <= padded[1] / 2 ? jy : jy - padded[1];
        for (int jx = 0; jx < padded[0]; ++jx, ++idx) {
          const long dx = jx <= padded[0] / 2 ? jx : jx - padded[0];
          const double r = h * std::sqrt(static_cast<double>(dx * dx + dy * dy +
                                                             dz * dz));
          real_buf[idx] = (r > 0.0)
                              ? -vol / (4.0 * std::numbers::pi * r)
                              : self_cell;
        }
      }
    }
    fftw_execute_dft_r2c(forward, real_buf, cplx_buf);
    kernel_hat.resize(n_cplx);
    for (std::size_t i = 0; i < n_cplx; ++i)
      kernel_hat[i] = {cplx_buf[i][0], cplx_buf[i][1]};
  }

  ScalarField solve(const ScalarField& f, bool force) const {
    if (f.grid() != grid)
      throw ConfigError("source field grid does not match the Poisson solver grid");

    const double fmax = f.max_abs();
    if (fmax == 0.0) return ScalarField(grid);

    const double ratio = boundary_ratio(f);
    if (ratio > options.fail_boundary_ratio) {
      const auto msg = fmt::format(
          "poisson: source does not decay at the box boundary "
          "(boundary/interior ratio {:.3e}, limit {:.3e})",
          ratio, options.fail_boundary_ratio);
      if (!force) throw NumericalError(msg + "; pass --force to override");
      log::warn("{} [forced]", msg);
    } else if (ratio > options.warn_boundary_ratio &&
               !warned.exchange(true)) {
      log::warn(
          "poisson: source boundary/interior ratio {:.3e} exceeds {:.3e}; "
          "free-space solution may be degraded (reported once per solver)",
          ratio, options.warn_boundary_ratio);
    }

    const auto t0 = std::chrono::steady_clock::now();

    auto real_buf = fftw_alloc_array<double>(n_real);
    auto cplx_buf = fftw_alloc_array<fftw_complex>(n_cplx);
    std::fill(real_buf.get(), real_buf.get() + n_real, 0.0);

    const int nx = grid.nx(), ny = grid.ny(), nz = grid.nz();
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < ny; ++iy) {
        const double* src = f.values().data() + grid.index(0, iy, iz);
        double* dst = real_buf.get() +
                      (static_cast<std::size_t>(iz) * padded[1] + iy) * padded[0];
        std::copy(src, src + nx, dst);
      }

    fftw_execute_dft_r2c(forward, real_buf.get(), cplx_buf.get());
    const double norm = 1.0 / static_cast<double>(n_real);
    for (std::size_t i = 0; i < n_cplx; ++i) {
      const std::complex<double> prod =
          std::complex<double>(cplx_buf[i][0], cplx_buf[i][1]) * kernel_hat[i] *
          norm;
      cplx_buf[i][0] = prod.real();
      cplx_buf[i][1] = prod.imag();
    }
    fftw_execute_dft_c2r(backward, cplx_buf.get(), real_buf.get());

    ScalarField v(grid);
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < ny; ++iy) {
        const double* src = real_buf.get() +
                            (static_cast<std::size_t>(iz) * padded[1] + iy) *
                                padded[0];
        double* dst = v.values().data() + grid.index(0, iy, iz);
        std::copy(src, src + nx, dst);
      }

    if (options.verbose) {
      const auto dt = std::chrono::duration<double, std::milli>(
          std::chrono::steady_clock::now() - t0);
      log::info("poisson: solved in {:.1f} ms, boundary ratio {:.3e}",
                dt.count(), ratio);
    }
    return v;
  }
};

PoissonSolver::PoissonSolver(const Grid& grid)
    : PoissonSolver(grid, Options{}) {}

PoissonSolver::PoissonSolver(const Grid& grid, Options options)
    : impl_(std::make_unique<Impl>(grid, options)) {}

PoissonSolver::~PoissonSolver() = default;

const Grid& PoissonSolver::grid() const { return impl_->grid; }

double PoissonSolver::boundary_ratio(const ScalarField& f) {
  const Grid& g = f.grid();
  const double fmax = f.max_abs();
  if (fmax == 0.0) return 0.0;
  double bmax = 0.0;
  const int nx = g.nx(), ny = g.ny(), nz = g.nz();
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < ny; ++iy)
      for (int ix = 0; ix < nx; ++ix) {
        if (ix > 0 && ix < nx - 1 && iy > 0 && iy < ny - 1 && iz > 0 &&
            iz < nz - 1)
          continue;
        bmax = std::max(bmax, std::abs(f.at(ix, iy, iz)));
      }
  return bmax / fmax;
}

ScalarField PoissonSolver::solve_free_space(const ScalarField& f,
                                            bool force) const {
  return impl_->solve(f, force);
}

ScalarField PoissonSolver::hartree_potential(const ScalarField& rho,
                                             bool force) const {
  if (rho.min_value() < -1e-12)
    throw ConfigError(fmt::format(
        "hartree potential: density has negative entries (min {:.3e})",
        rho.min_value()));
  ScalarField f = rho;
  f *= -4.0 * std::numbers::pi;
  return impl_->solve(f, force);
}

} // namespace cavks

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

#include "cavks/errors.hpp"
#include "cavks/field_ops.hpp"
#include "cavks/poisson.hpp"
#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

using namespace cavks;
using Catch::Matchers::WithinAbs;

namespace {

// normalized Gaussian charge, analytic potential erf(r / (sigma sqrt(2))) / r
ScalarField gaussian_charge(const Grid& g, double sigma) {
  const double norm = std::pow(2.0 * std::numbers::pi * sigma * sigma, -1.5);
  return test::gaussian(g, sigma, {0, 0, 0}, norm);
}

double gaussian_potential(double r, double sigma) {
  if (r < 1e-10) return std::sqrt(2.0 / std::numbers::pi) / sigma;
  return std::erf(r / (sigma * std::sqrt(2.0))) / r;
}

} // namespace

TEST_CASE("zero source gives a zero potential", "[poisson]") {
  const Grid g = Grid::from_half_width(4.0, 0.5);
  const PoissonSolver solver(g);
  const ScalarField v = solver.solve_free_space(ScalarField(g));
  CHECK(v.max_abs() == 0.0);
}

TEST_CASE("Gaussian charge reproduces the analytic potential", "[poisson]") {
  const Grid g = Grid::from_half_width(8.0, 0.25);
  const PoissonSolver solver(g);
  const double sigma = 1.0;
  ScalarField f = gaussian_charge(g, sigma);
  f *= -4.0 * std::numbers::pi;
  const ScalarField v = solver.solve_free_space(f);

  double worst = 0.0;
  for (int iz = 2; iz < g.nz() - 2; ++iz)
    for (int iy = 2; iy < g.ny() - 2; ++iy)
      for (int ix = 2; ix < g.nx() - 2; ++ix) {
        const auto [x, y, z] = g.point(ix, iy, iz);
        const double r = std::sqrt(x * x + y * y + z * z);
        const double exact = gaussian_potential(r, sigma);
        worst = std::max(worst, std::abs(v.at(ix, iy, iz) - exact) / exact);
      }
  CHECK(worst < 0.01);
}

TEST_CASE("solutions translate with the source", "[poisson]") {
  const Grid g = Grid::from_half_width(6.0, 0.5);
  const PoissonSolver solver(g);
  const double h = g.spacing();

  ScalarField f = test::gaussian(g, 0.6);
  f *= -4.0 * std::numbers::pi;
  ScalarField f_shifted = test::gaussian(g, 0.6, {2.0 * h, 0.0, 0.0});
  f_shifted *= -4.0 * std::numbers::pi;

  const ScalarField v = solver.solve_free_space(f);
  const ScalarField vs = solver.solve_free_space(f_shifted);
  double worst = 0.0;
  for (int iz = 0; iz < g.nz(); ++iz)
    for (int iy = 0; iy < g.ny(); ++iy)
      for (int ix = 0; ix < g.nx() - 2; ++ix)
        worst = std::max(worst,
                         std::abs(v.at(ix, iy, iz) - vs.at(ix + 2, iy, iz)));
  CHECK(worst < 1e-10);
}

TEST_CASE("solver is linear in the source", "[poisson]") {
  const Grid g = Grid::from_half_width(6.0, 0.5);
  const PoissonSolver solver(g);
  const auto f = test::gaussian(g, 0.6);
  const auto h = test::gaussian(g, 0.8, {1.0, -0.5, 0.0});

  ScalarField combo = 1.3 * f;
  combo += (-0.7) * h;
  const auto direct = solver.solve_free_space(combo);
  ScalarField sum = 1.3 * solver.solve_free_space(f);
  sum += (-0.7) * solver.solve_free_space(h);
  CHECK(test::max_difference(direct, sum) < 1e-12);
}

TEST_CASE("laplacian round trip recovers a smooth source", "[poisson]") {
  // kernel-based solve vs stencil laplacian: the mismatch floor is the
  // stencil truncation error, measured here on a well-resolved Gaussian
  const Grid g = Grid::from_half_width(8.0, 0.25);
  const PoissonSolver solver(g);
  ScalarField f = gaussian_charge(g, 1.2);
  f *= -4.0 * std::numbers::pi;
  const ScalarField v = solver.solve_free_space(f);
  const ScalarField lap = laplacian(v);

  double worst = 0.0;
  for (int iz = 2; iz < g.nz() - 2; ++iz)
    for (int iy = 2; iy < g.ny() - 2; ++iy)
      for (int ix = 2; ix < g.nx() - 2; ++ix)
        worst = std::max(worst, std::abs(lap.at(ix, iy, iz) -
                                         f.at(ix, iy, iz)));
  CHECK(worst / f.max_abs() < 0.02);
}

TEST_CASE("hartree potential of a Gaussian density", "[poisson]") {
  const Grid g = Grid::from_half_width(8.0, 0.25);
  const PoissonSolver solver(g);
  const ScalarField rho = gaussian_charge(g, 1.0);
  const ScalarField vh = solver.hartree_potential(rho);

  SECTION("zero density gives zero potential") {
    CHECK(solver.hartree_potential(ScalarField(g)).max_abs() == 0.0);
  }

  SECTION("far field approaches 1/r") {
    double worst = 0.0;
    int checked = 0;
    for (int iz = 0; iz < g.nz(); ++iz)
      for (int iy = 0; iy < g.ny(); ++iy)
        for (int ix = 0; ix < g.nx(); ++ix) {
          const auto [x, y, z] = g.point(ix, iy, iz);
          const double r = std::sqrt(x * x + y * y + z * z);
          if (std::abs(r - 6.0) > 0.1) continue;
          ++checked;
          worst = std::max(worst,
                           std::abs(vh.at(ix, iy, iz) - 1.0 / r) * r);
        }
    REQUIRE(checked > 0);
    CHECK(worst < 0.005);
  }

  SECTION("hartree self-energy matches 1/(2 sigma sqrt(pi))") {
    ScalarField integrand = rho;
    for (std::size_t i = 0; i < integrand.size(); ++i)
      integrand[i] *= vh[i];
    const double energy = 0.5 * integrate(integrand);
    CHECK_THAT(energy,
               WithinAbs(1.0 / (2.0 * std::sqrt(std::numbers::pi)), 1e-3));
  }

  SECTION("negative densities are rejected") {
    ScalarField bad = rho;
    bad[100] = -1e-6;
    CHECK_THROWS_AS(solver.hartree_potential(bad), ConfigError);
  }
}

TEST_CASE("zero-total-charge sources decay fast", "[poisson]") {
  const Grid g = Grid::from_half_width(8.0, 0.4);
  const PoissonSolver solver(g);
  const auto rho = test::gaussian(g, 1.0);
  const ScalarField src = directional_second_derivative(rho, Direction::z());
  const ScalarField v = solver.solve_free_space(src);
  CHECK(PoissonSolver::boundary_ratio(v) < 0.05);
}

TEST_CASE("non-decaying sources are refused unless forced", "[poisson]") {
  const Grid g = Grid::from_half_width(4.0, 0.5);
  const PoissonSolver solver(g);
  ScalarField f(g);
  std::fill(f.values().begin(), f.values().end(), 1.0);
  CHECK_THROWS_AS(solver.solve_free_space(f), NumericalError);
  CHECK_NOTHROW(solver.solve_free_space(f, /*force=*/true));
}

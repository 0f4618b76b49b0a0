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
#include "cavks/field_ops.hpp"
#include "cavks/kohn_sham.hpp"
#include "test_helpers.hpp"

#include <catch2/catch_amalgamated.hpp>
#include <Eigen/Dense>

#include <cmath>
#include <numbers>

using namespace cavks;
using Catch::Matchers::WithinAbs;

namespace {

const BareMode kMode2eV{0.0734986443513, 0.1, Direction::z()};

SystemSpec soft_hydrogen(const Grid& g) {
  return SystemSpec{{Nucleus{{0, 0, 0}, 1.0, 0.5}}, 1, g, false};
}

SystemSpec helium_analogue(const Grid& g) {
  return SystemSpec{{Nucleus{{0, 0, 0}, 2.0, 0.5}}, 2, g, true};
}

} // namespace

TEST_CASE("system spec validation", "[kohn_sham]") {
  const Grid g = Grid::centered({8, 8, 8}, 0.5);
  CHECK_THROWS_AS((SystemSpec{{}, 3, g, true}.validate()), ConfigError);
  CHECK_THROWS_AS((SystemSpec{{}, 1, g, true}.validate()), ConfigError);
  CHECK_THROWS_AS((SystemSpec{{Nucleus{{0, 0, 0}, 1.0, 0.0}}, 2, g, true}.validate()),
                  ConfigError);
  CHECK_NOTHROW((SystemSpec{{}, 1, g, false}.validate()));
  CHECK_NOTHROW((SystemSpec{{}, 4, g, true}.validate()));
  CHECK((SystemSpec{{}, 4, g, true}).occupations() ==
        std::vector<double>{2.0, 2.0});
}

TEST_CASE("external potential of softened nuclei", "[kohn_sham]") {
  SECTION("value at the nucleus is the analytic limit") {
    const Grid g = Grid::centered({9, 9, 9}, 0.5); // odd: has a point at 0
    const SystemSpec spec{{Nucleus{{0, 0, 0}, 1.0, 0.5}}, 1, g, false};
    const ScalarField v = external_potential(spec);
    const double expected = -2.0 / (0.5 * std::sqrt(std::numbers::pi));
    CHECK_THAT(v.at(4, 4, 4), WithinAbs(expected, 1e-12));
    CHECK_THAT(expected, WithinAbs(-2.25676, 1e-5));
  }

  SECTION("far field is Coulombic") {
    const Grid g({45, 9, 9}, 0.5, {-11.0, -2.0, -2.0});
    const SystemSpec spec{{Nucleus{{0, 0, 0}, 1.0, 0.5}}, 1, g, false};
    const ScalarField v = external_potential(spec);
    REQUIRE_THAT(g.coord(0, 42), WithinAbs(10.0, 1e-12));
    CHECK_THAT(v.at(42, 4, 4), WithinAbs(-0.1, 1e-9));
  }

  SECTION("two nuclei superpose") {
    const Grid g = Grid::from_half_width(4.0, 0.5);
    const Nucleus a{{1.0, 0, 0}, 1.0, 0.5};
    const Nucleus b{{-1.0, 0.5, 0}, 2.0, 0.7};
    const auto va = external_potential({{a}, 1, g, false});
    const auto vb = external_potential({{b}, 1, g, false});
    const auto vab = external_potential({{a, b}, 1, g, false});
    ScalarField sum = va;
    sum += vb;
    CHECK(test::max_difference(vab, sum) < 1e-14);
  }
}

TEST_CASE("hamiltonian application", "[kohn_sham]") {
  const Grid g = Grid::from_half_width(4.0, 0.5);

  SECTION("zero field maps to zero") {
    const ScalarField v = test::gaussian(g, 1.0);
    CHECK(apply_hamiltonian(ScalarField(g), v).max_abs() == 0.0);
  }

  SECTION("grid mismatch is rejected") {
    const Grid other = Grid::from_half_width(4.0, 0.25);
    CHECK_THROWS_AS(apply_hamiltonian(ScalarField(g), ScalarField(other)),
                    ConfigError);
  }

  SECTION("discrete box mode is an eigenvector") {
    // independent oracle: dense 1D eigensolve of the stencil; the 3D operator
    // separates into a product mode
    const int n = g.nx();
    const double h = g.spacing();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      k(i, i) = 30.0 / (24.0 * h * h);
      if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = -16.0 / (24.0 * h * h);
      if (i + 2 < n) k(i, i + 2) = k(i + 2, i) = 1.0 / (24.0 * h * h);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    const Eigen::VectorXd mode = es.eigenvectors().col(0);
    const double e0 = es.eigenvalues()(0);

    ScalarField phi(g);
    for (int iz = 0; iz < n; ++iz)
      for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix)
          phi.at(ix, iy, iz) = mode(ix) * mode(iy) * mode(iz);

    const ScalarField hphi = apply_hamiltonian(phi, ScalarField(g));
    ScalarField resid = hphi;
    resid -= (3.0 * e0) * phi;
    CHECK(resid.max_abs() < 1e-10 * (3.0 * e0) * phi.max_abs());
  }

  SECTION("operator is symmetric") {
    const ScalarField v = test::gaussian(g, 1.2);
    const auto psi = test::random_field(g, 11);
    const auto phi = test::random_field(g, 12);
    const double a = inner_product(psi, apply_hamiltonian(phi, v));
    const double b = inner_product(apply_hamiltonian(psi, v), phi);
    CHECK_THAT(a, WithinAbs(b, 1e-10 * std::abs(a)));
  }
}

TEST_CASE("scf of the noninteracting one-electron system", "[kohn_sham]") {
  const Grid g = Grid::from_half_width(6.0, 0.5);
  const SystemSpec spec = soft_hydrogen(g);

  SECTION("no cavity: converges in two cycles to the direct eigensolution") {
    const KSState state = scf(spec, {}, {}, XcChoice::none);
    CHECK(state.scf_history.size() <= 2);

    const ScalarField v = external_potential(spec);
    const EigenResult direct = lowest_eigenpairs(v, 1);
    ScalarField rho_direct(g);
    for (std::size_t i = 0; i < rho_direct.size(); ++i)
      rho_direct[i] = direct.orbitals[0][i] * direct.orbitals[0][i];
    // agreement at the eigensolver-tolerance level (the second cycle
    // re-solves from a warm start)
    CHECK(test::max_difference(state.density, rho_direct) < 1e-8);
    CHECK_THAT(integrate(state.density), WithinAbs(1.0, 1e-10));
  }

  SECTION("lambda = 0 equals pxc disabled, field by field") {
    const BareMode uncoupled{kMode2eV.omega, 0.0, Direction::z()};
    const std::vector<BareMode> modes{uncoupled};
    const KSState a = scf(spec, modes, {}, XcChoice::none);
    ScfOptions no_pxc;
    no_pxc.pxc_enabled = false;
    const KSState b = scf(spec, modes, {}, XcChoice::none, no_pxc);
    CHECK(test::max_difference(a.density, b.density) < 1e-12);
    CHECK(test::max_difference(a.potentials.v_ks, b.potentials.v_ks) < 1e-12);
    CHECK(test::max_difference(a.potentials.v_pxc, b.potentials.v_pxc) == 0.0);
    CHECK_THAT(a.eigenvalues[0], WithinAbs(b.eigenvalues[0], 1e-12));
  }

  SECTION("z-polarized mode keeps the density z-symmetric through full scf") {
    // wide box: the pxc source must decay before the boundary
    const Grid wide = Grid::from_half_width(8.0, 0.5);
    const SystemSpec wide_spec = soft_hydrogen(wide);
    const std::vector<BareMode> modes{kMode2eV};
    ScfOptions opt;
    opt.eig_tol = 1e-10;
    const KSState state = scf(wide_spec, modes, {}, XcChoice::none, opt);
    CHECK(test::parity_error(state.density, 2) < 1e-8);
    // the pxc potential itself stays symmetric as well
    CHECK(test::parity_error(state.potentials.v_pxc, 2) < 1e-8);
  }
}

TEST_CASE("scf of the helium analogue", "[kohn_sham]") {
  const Grid g = Grid::from_half_width(6.0, 0.5);
  const SystemSpec spec = helium_analogue(g);

  const KSState state = scf(spec, {}, {}, XcChoice::lda_pz81);

  SECTION("converged state satisfies the KSState invariants") {
    CHECK_THAT(integrate(state.density), WithinAbs(2.0, 1e-8));
    CHECK_THAT(inner_product(state.orbitals[0], state.orbitals[0]),
               WithinAbs(1.0, 1e-8));
    ScalarField rho(g);
    for (std::size_t i = 0; i < rho.size(); ++i)
      rho[i] = 2.0 * state.orbitals[0][i] * state.orbitals[0][i];
    CHECK(test::max_difference(rho, state.density) < 1e-14);
    // v_ks is the sum of the four contributions
    ScalarField sum = state.potentials.v_ext;
    sum += state.potentials.v_hartree;
    sum += state.potentials.v_xc;
    sum += state.potentials.v_pxc;
    CHECK(test::max_difference(sum, state.potentials.v_ks) == 0.0);
  }

  SECTION("self-consistency: rebuilding the potentials barely moves eps0") {
    const PoissonSolver solver(g);
    ScalarField v = external_potential(spec);
    v += solver.hartree_potential(state.density);
    v += lda_xc_potential(state.density, XcChoice::lda_pz81);
    const EigenResult re = lowest_eigenpairs(v, 1, {}, state.orbitals);
    CHECK_THAT(re.eigenvalues[0], WithinAbs(state.eigenvalues[0], 1e-6));
  }

  SECTION("pulay mixing reaches the same fixed point") {
    ScfOptions opt;
    opt.mixing = MixingKind::pulay;
    const KSState pulay = scf(spec, {}, {}, XcChoice::lda_pz81, opt);
    CHECK(test::max_difference(pulay.density, state.density) < 1e-5);
    CHECK(pulay.scf_history.size() <= state.scf_history.size());
  }

  SECTION("non-convergence raises with the history attached") {
    ScfOptions opt;
    opt.max_iter = 2;
    try {
      scf(spec, {}, {}, XcChoice::lda_pz81, opt);
      FAIL("expected ScfNonConvergence");
    } catch (const ScfNonConvergence& e) {
      CHECK(e.history.size() == 2);
    }
  }
}

TEST_CASE("renormalization below one shrinks the cavity-induced density shift",
          "[kohn_sham]") {
  const Grid g = Grid::from_half_width(6.0, 0.5);
  const SystemSpec spec = helium_analogue(g);
  const std::vector<BareMode> modes{{kMode2eV.omega, 0.01, Direction::z()}};

  const KSState free = scf(spec, {}, {}, XcChoice::lda_pz81);
  const KSState px = scf(spec, modes, PxcParams{1.0, 1e-12}, XcChoice::lda_pz81);
  const KSState pxc =
      scf(spec, modes, PxcParams{0.3, 1e-12}, XcChoice::lda_pz81);

  const double shift_px = test::max_difference(px.density, free.density);
  const double shift_pxc = test::max_difference(pxc.density, free.density);
  CHECK(shift_pxc < shift_px);
  CHECK(shift_px > 0.0);
}

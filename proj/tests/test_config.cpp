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

#include "cavks/config.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <fstream>

using namespace cavks;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;

namespace {

const std::string kFullConfig = R"(
# soft hydrogen atom in a 2 eV cavity
system.nuclei      = [{0, 0, 0, 1.0, 0.5}]
system.n_electrons = 1
system.interactions = off

grid.half_width_bohr = 8.0
grid.spacing_bohr    = 0.4

cavity.omega_ev     = 2.0
cavity.lambda       = 0.1
cavity.polarization = z

xc.choice   = none
pxc.enabled = true
pxc.eta_c   = 1.0

scf.mixing  = linear
scf.alpha   = 0.3

oracle.n_max = 4
scan.step    = 0.1
seed         = 7
)";

}

TEST_CASE("full config parses with derived builders", "[config]") {
  const RunConfig cfg = RunConfig::parse_string(kFullConfig);
  CHECK(cfg.n_electrons == 1);
  CHECK_FALSE(cfg.interactions);
  CHECK(cfg.nuclei.size() == 1);
  CHECK_THAT(*cfg.omega_ha, WithinAbs(0.0734986443513, 1e-10));
  CHECK(cfg.lambda == 0.1);
  CHECK(cfg.seed == 7);

  const Grid g = cfg.make_grid();
  CHECK(g.dims()[0] == 40);
  const SystemSpec spec = cfg.make_system(g);
  CHECK(spec.n_electrons == 1);
  const auto modes = cfg.make_modes();
  REQUIRE(modes.size() == 1);
  CHECK(modes[0].lambda == 0.1);
  const PFConfig pf = cfg.make_pf_config(g);
  CHECK(pf.n_max == 4);
  CHECK(pf.seed == 7);
  CHECK(pf.mode.omega_tilde > modes[0].omega);
}

TEST_CASE("defaults match the documented values", "[config]") {
  const RunConfig cfg = RunConfig::parse_string("system.n_electrons = 2\n");
  CHECK(cfg.interactions);
  CHECK(cfg.grid_half_width == 8.0);
  CHECK(cfg.grid_spacing == 0.25);
  CHECK(cfg.xc == XcChoice::lda_pz81);
  CHECK(cfg.pxc_enabled);
  CHECK(cfg.eta_c == 1.0);
  CHECK(cfg.scan.eta_min == 0.0);
  CHECK(cfg.scan.eta_max == 1.5);
  CHECK(cfg.scan.step == 0.1);
  CHECK(cfg.seed == 1);
  CHECK(cfg.make_modes().empty());
}

TEST_CASE("unknown keys are hard errors that name the key", "[config]") {
  try {
    RunConfig::parse_string("system.n_electrons = 2\nsystme.typo = 5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK_THAT(e.what(), ContainsSubstring("systme.typo"));
  }
}

TEST_CASE("config syntax errors", "[config]") {
  CHECK_THROWS_AS(RunConfig::parse_string("system.n_electrons 2\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("system.n_electrons =\n"), ConfigError);
  CHECK_THROWS_AS(
      RunConfig::parse_string("system.n_electrons = 2\nsystem.n_electrons = 4\n"),
      ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("system.n_electrons = two\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("system.n_electrons = 0\n"),
                  ConfigError);
}

TEST_CASE("cavity frequency rules", "[config]") {
  CHECK_THROWS_AS(RunConfig::parse_string(
                      "cavity.omega_ev = 2\ncavity.omega_ha = 0.07\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("cavity.lambda = 0.1\n"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("cavity.polarization = z\n"),
                  ConfigError);
  const RunConfig ha = RunConfig::parse_string("cavity.omega_ha = 0.25\n");
  CHECK(*ha.omega_ha == 0.25);
}

TEST_CASE("nuclei list syntax", "[config]") {
  const RunConfig two = RunConfig::parse_string(
      "system.nuclei = [{0,0,0,1,0.5}, {1.5, 0, 0, 2, 0.7}]\n");
  REQUIRE(two.nuclei.size() == 2);
  CHECK(two.nuclei[1].position[0] == 1.5);
  CHECK(two.nuclei[1].charge == 2.0);
  CHECK(two.nuclei[1].softening == 0.7);

  const RunConfig empty = RunConfig::parse_string("system.nuclei = []\n");
  CHECK(empty.nuclei.empty());

  CHECK_THROWS_AS(RunConfig::parse_string("system.nuclei = [{1,2,3}]\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("system.nuclei = [{1,2,3,4,5,6}]\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("system.nuclei = {0,0,0,1,0.5}\n"),
                  ConfigError);
  CHECK_THROWS_AS(RunConfig::parse_string("system.nuclei = [{0,0,0,1,0}]\n"),
                  ConfigError);
}

TEST_CASE("polarization forms", "[config]") {
  const RunConfig x = RunConfig::parse_string(
      "cavity.omega_ha = 0.25\ncavity.polarization = x\n");
  CHECK(x.polarization[0] == 1.0);
  const RunConfig custom = RunConfig::parse_string(
      "cavity.omega_ha = 0.25\ncavity.polarization = 1,1,0\n");
  CHECK_THAT(custom.polarization[0], WithinAbs(1.0 / std::sqrt(2.0), 1e-12));
  CHECK_THROWS_AS(RunConfig::parse_string(
                      "cavity.omega_ha = 0.25\ncavity.polarization = 1,1\n"),
                  ConfigError);
}

TEST_CASE("file reference paths must resolve at parse time", "[config]") {
  CHECK_THROWS_AS(RunConfig::parse_string(
                      "calibrate.reference = files\n"
                      "calibrate.ref_in = /nonexistent/in.grid\n"
                      "calibrate.ref_out = /nonexistent/out.grid\n"),
                  ConfigError);

  const auto dir = std::filesystem::temp_directory_path() / "cavks_cfg_tests";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "in.grid") << "x\n";
  std::ofstream(dir / "out.grid") << "x\n";
  const RunConfig ok = RunConfig::parse_string(
      "calibrate.reference = files\n"
      "calibrate.ref_in = " + (dir / "in.grid").string() + "\n" +
      "calibrate.ref_out = " + (dir / "out.grid").string() + "\n");
  CHECK(ok.reference == ReferenceSource::files);
}

TEST_CASE("describe echoes a resolved, diffable config", "[config]") {
  const RunConfig cfg = RunConfig::parse_string(kFullConfig);
  const std::string echo = cfg.describe();
  CHECK_THAT(echo, ContainsSubstring("system.n_electrons = 1"));
  CHECK_THAT(echo, ContainsSubstring("grid.spacing_bohr = 0.4"));
  CHECK_THAT(echo, ContainsSubstring("seed = 7"));
  // round trip: the echo itself parses (minus the unset markers)
  CHECK_THAT(echo, !ContainsSubstring("(unset)"));
}

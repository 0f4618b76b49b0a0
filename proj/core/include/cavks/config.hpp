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
#include "cavks/compare.hpp"
#include "cavks/functionals.hpp"
#include "cavks/kohn_sham.hpp"
#include "cavks/oracle.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace cavks {

/// Where a calibration run takes its reference density pair from.
enum class ReferenceSource { oracle, files };

/// Flat `key = value` run configuration with dotted keys. `#` starts a
/// comment. Unknown keys are hard errors; exactly one of cavity.omega_ev and
/// cavity.omega_ha may be given; input file paths must resolve at parse time.
struct RunConfig {
  // system
  std::vector<Nucleus> nuclei;
  std::optional<int> n_electrons;
  bool interactions = true;

  // grid
  double grid_half_width = 8.0;
  double grid_spacing = 0.25;

  // cavity (absent block means no mode, i.e. lambda = 0)
  std::optional<double> omega_ha;
  double lambda = 0.0;
  Direction polarization = Direction::z();

  // xc / pxc
  XcChoice xc = XcChoice::lda_pz81;
  bool pxc_enabled = true;
  double eta_c = 1.0;
  double density_floor = 1e-12;

  // scf
  MixingKind mixing = MixingKind::linear;
  double scf_alpha = 0.3;
  int pulay_depth = 5;
  int scf_max_iter = 200;
  double tol_density = 1e-7;
  double tol_eig = 1e-7;
  double eig_tol = 1e-8;
  int eig_max_iter = 500;

  // oracle
  int oracle_n_max = 4;
  double oracle_eig_tol = 1e-8;
  std::vector<int> oracle_n_max_list; // empty -> {oracle_n_max}
  int oracle_max_basis = 150;

  // scan / calibrate
  ScanOptions scan;
  ReferenceSource reference = ReferenceSource::oracle;
  std::filesystem::path reference_in;
  std::filesystem::path reference_out;
  int calibrate_decimate = 1;

  // misc
  std::uint64_t seed = 1;

  static RunConfig parse_file(const std::filesystem::path& path);
  static RunConfig parse_string(const std::string& text);

  /// All effective values as sorted `key = value` lines (the resolved config
  /// echoed to the run log).
  std::string describe() const;

  // -- derived builders ----------------------------------------------------
  Grid make_grid() const;
  SystemSpec make_system(const Grid& grid) const;
  std::vector<BareMode> make_modes() const; // empty when no cavity block
  PxcParams make_pxc_params() const;
  ScfOptions make_scf_options() const;
  PFConfig make_pf_config(const Grid& grid) const;
  std::vector<int> effective_n_max_list() const;
};

} // namespace cavks

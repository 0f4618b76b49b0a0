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

#include "cli_commands.hpp"

#include "cavks/field_ops.hpp"
#include "cavks/grid_io.hpp"
#include "cavks/log.hpp"
#include "cavks/version.hpp"

#include <fmt/core.h>

#include <cmath>
#include <sstream>

namespace cavks::cli {

namespace {

RunConfig with_overrides(RunConfig config, const Context& ctx) {
  if (ctx.seed_override) config.seed = *ctx.seed_override;
  return config;
}

void echo_header(const RunConfig& config, const Grid& grid,
                 std::string_view command) {
  log::info("cavks {} ({})", version_string, command);
  std::istringstream lines(config.describe());
  std::string line;
  while (std::getline(lines, line)) log::info("config: {}", line);
  log::info("grid: {} x {} x {} points, spacing {:.6g} Bohr, box "
            "[{:.6g}, {:.6g}] x [{:.6g}, {:.6g}] x [{:.6g}, {:.6g}] Bohr",
            grid.nx(), grid.ny(), grid.nz(), grid.spacing(), grid.origin()[0],
            grid.coord(0, grid.nx() - 1), grid.origin()[1],
            grid.coord(1, grid.ny() - 1), grid.origin()[2],
            grid.coord(2, grid.nz() - 1));
}

void echo_dressed(const DressedMode& mode, int n_electrons) {
  log::info("dressed mode: omega_tilde {:.10g} Ha, lambda_tilde {:.10g}, "
            "polarization ({:.6g}, {:.6g}, {:.6g}), collective coupling {:.6g}",
            mode.omega_tilde, mode.lambda_tilde, mode.epsilon[0],
            mode.epsilon[1], mode.epsilon[2],
            collective_coupling(mode, n_electrons));
}

std::filesystem::path prepare_out_dir(const Context& ctx) {
  if (!ctx.out_dir.empty()) std::filesystem::create_directories(ctx.out_dir);
  return ctx.out_dir;
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<ScfHistoryEntry>& history) {
  std::vector<std::vector<double>> rows;
  rows.reserve(history.size());
  for (const auto& h : history)
    rows.push_back({static_cast<double>(h.iter), h.density_change, h.eig_drift});
  write_csv(path, {"iter", "density_change", "eig_drift"}, rows);
}

void write_axis_cuts(const std::filesystem::path& dir, const ScalarField& f,
                     std::string_view suffix) {
  const Grid& g = f.grid();
  const char axis_name[3] = {'x', 'y', 'z'};
  for (int axis = 0; axis < 3; ++axis) {
    const int b = (axis == 0) ? 1 : 0;
    const int c = (axis == 2) ? 1 : 2;
    const std::array<double, 2> offsets{
        g.coord(b, g.nearest_index(b, 0.0)),
        g.coord(c, g.nearest_index(c, 0.0))};
    write_line_cut_csv(dir / fmt::format("cut_{}{}.csv", axis_name[axis], suffix),
                       line_cut(f, axis, offsets));
  }
}

// Brings a field pair onto a common grid, restricting the finer field onto
// the coarser grid when the grids differ but nest.
std::pair<ScalarField, ScalarField> common_grid(ScalarField a, ScalarField b,
                                                std::string_view what) {
  if (a.grid() == b.grid()) return {std::move(a), std::move(b)};
  const bool a_finer = a.grid().spacing() < b.grid().spacing();
  try {
    if (a_finer) {
      ScalarField ra = restrict_to(a, b.grid());
      return {std::move(ra), std::move(b)};
    }
    ScalarField rb = restrict_to(b, a.grid());
    return {std::move(a), std::move(rb)};
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format(
        "{}: grids do not match and cannot be restricted "
        "({}^3 @ {:.6g} Bohr vs {}^3 @ {:.6g} Bohr): {}",
        what, a.grid().nx(), a.grid().spacing(), b.grid().nx(),
        b.grid().spacing(), e.what()));
  }
}

} // namespace

int guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    log::warn("error: {}", e.what());
    return exit_usage;
  } catch (const NumericalError& e) {
    log::warn("error: {}", e.what());
    return exit_numerical;
  }
}

int cmd_scf(const RunConfig& raw_config, const Context& ctx) {
  const RunConfig config = with_overrides(raw_config, ctx);
  const Grid grid = config.make_grid();
  echo_header(config, grid, "scf");

  const SystemSpec spec = config.make_system(grid);
  const auto modes = config.make_modes();
  for (const auto& m : modes) echo_dressed(dress(m, spec.n_electrons), spec.n_electrons);

  const auto out_dir = prepare_out_dir(ctx);
  ScfOptions options = config.make_scf_options();
  options.poisson_force = ctx.force;

  try {
    const KSState state = scf(spec, modes, config.make_pxc_params(), config.xc,
                              options);
    log::info("scf converged in {} cycles; eps0 {:.10f} Ha; total charge {:.12g}",
              state.scf_history.size(), state.eigenvalues[0],
              integrate(state.density));
    write_density_grid(out_dir / "density.grid", state.density,
                       fmt::format("# cavks {} scf density", version_string));
    write_history_csv(out_dir / "scf_history.csv", state.scf_history);
  } catch (const ScfNonConvergence& e) {
    write_history_csv(out_dir / "scf_history.csv", e.history);
    throw;
  }
  return exit_ok;
}

int cmd_oracle(const RunConfig& raw_config, const Context& ctx) {
  const RunConfig config = with_overrides(raw_config, ctx);
  if (config.n_electrons && *config.n_electrons != 1)
    throw ConfigError(
        "the oracle solves the one-electron problem exactly; set "
        "system.n_electrons = 1");

  const Grid grid = config.make_grid();
  echo_header(config, grid, "oracle");
  const PFConfig base = config.make_pf_config(grid);
  echo_dressed(base.mode, 1);

  const auto out_dir = prepare_out_dir(ctx);
  const std::vector<int> n_max_list = config.effective_n_max_list();

  std::vector<std::vector<double>> rows;
  std::optional<PFGroundState> last;
  for (int n_max : n_max_list) {
    PFConfig cfg = base;
    cfg.n_max = n_max;
    PFGroundState gs = pf_ground_state(cfg);
    const double i_prev = last ? i_metric(last->electron_density,
                                          gs.electron_density)
                               : std::numeric_limits<double>::quiet_NaN();
    log::info("oracle n_max {:2d}: E0 {:+.10f} Ha (residual {:.2e}, {} matvecs), "
              "I vs previous {:.3e}",
              n_max, gs.energy, gs.residual, gs.matvecs, i_prev);
    rows.push_back({static_cast<double>(n_max), gs.energy, i_prev});
    last = std::move(gs);
  }

  log::info("oracle ground state energy {:.10f} Ha (omega_tilde/2 = {:.10f})",
            last->energy, 0.5 * base.mode.omega_tilde);
  write_density_grid(out_dir / "density.grid", last->electron_density,
                     fmt::format("# cavks {} oracle electron density",
                                 version_string));
  write_csv(out_dir / "fock_convergence.csv", {"n_max", "E0_ha", "I_vs_prev"},
            rows);
  return exit_ok;
}

int cmd_calibrate(const RunConfig& raw_config, const Context& ctx) {
  const RunConfig config = with_overrides(raw_config, ctx);
  const Grid grid = config.make_grid();
  echo_header(config, grid, "calibrate");

  const SystemSpec spec = config.make_system(grid);
  const auto modes = config.make_modes();
  if (modes.empty() || modes[0].lambda <= 0.0)
    throw ConfigError("calibration needs a coupled cavity mode (cavity.lambda > 0)");
  echo_dressed(dress(modes[0], spec.n_electrons), spec.n_electrons);

  const auto out_dir = prepare_out_dir(ctx);

  // reference density pair
  DensityPair reference = [&] {
    if (config.reference == ReferenceSource::files) {
      log::info("reference: files {} / {}", config.reference_in.string(),
                config.reference_out.string());
      auto [in_f, out_f] =
          common_grid(read_density_grid(config.reference_in),
                      read_density_grid(config.reference_out), "reference pair");
      return DensityPair::make(std::move(in_f), std::move(out_f));
    }
    if (spec.n_electrons != 1)
      throw ConfigError(
          "the built-in oracle reference is one-electron only; provide "
          "calibrate.reference = files for larger systems");
    const Grid oracle_grid = decimate_grid(grid, config.calibrate_decimate);
    log::info("reference: exact diagonalization on a {}^3 grid (n_max {})",
              oracle_grid.nx(), config.oracle_n_max);
    RunConfig oracle_cfg = config;
    oracle_cfg.grid_half_width = 0; // unused below; keep explicit grid
    PFConfig coupled = config.make_pf_config(oracle_grid);
    PFGroundState in_gs = pf_ground_state(coupled);
    log::info("oracle (coupled): E0 {:+.10f} Ha, residual {:.2e}", in_gs.energy,
              in_gs.residual);
    PFConfig free = coupled;
    free.mode = dress(BareMode{*config.omega_ha, 0.0, config.polarization}, 1);
    free.n_max = 1;
    PFGroundState out_gs = pf_ground_state(free);
    log::info("oracle (cavity-free): E0 {:+.10f} Ha, residual {:.2e}",
              out_gs.energy, out_gs.residual);
    return DensityPair::make(std::move(in_gs.electron_density),
                             std::move(out_gs.electron_density));
  }();

  // cavity-free KS density, shared by every scan point
  const PoissonSolver solver(grid);
  ScfOptions options = config.make_scf_options();
  ScfOptions options_off = options;
  options_off.pxc_enabled = false;
  const KSState free_state =
      scf(spec, modes, config.make_pxc_params(), config.xc, options_off, &solver);
  ScalarField rho_out = restrict_to(free_state.density, reference.delta.grid());

  const PairRunner runner = [&](double eta_c) {
    PxcParams params = config.make_pxc_params();
    params.eta_c = eta_c;
    const KSState state = scf(spec, modes, params, config.xc, options, &solver);
    ScalarField rho_in = restrict_to(state.density, reference.delta.grid());
    return DensityPair::make(std::move(rho_in), rho_out);
  };

  auto write_scan_csv = [&](const CalibrationResult& result) {
    std::vector<std::vector<double>> rows;
    for (const auto& p : result.scan)
      rows.push_back({static_cast<double>(p.stage), p.eta_c, p.i_value});
    write_csv(out_dir / "calibration.csv", {"stage", "eta_c", "I"}, rows);
  };

  try {
    const CalibrationResult result =
        calibrate_eta(reference, runner, config.scan);
    write_scan_csv(result);

    const DensityPair best = runner(result.eta_star);
    write_density_grid(out_dir / "delta_rho.grid", best.delta,
                       fmt::format("# cavks {} calibrated delta rho (eta_c = "
                                   "{:.12g})",
                                   version_string, result.eta_star));
    write_density_grid(out_dir / "delta_rho_reference.grid", reference.delta,
                       fmt::format("# cavks {} reference delta rho",
                                   version_string));
    write_axis_cuts(out_dir, best.delta, "");
    fmt::print("eta_star={:.12g} I_star={:.12g}\n", result.eta_star,
               result.i_star);
  } catch (const CalibrationAbort& e) {
    write_scan_csv(e.partial);
    throw;
  }
  return exit_ok;
}

int cmd_compare(const std::filesystem::path& a_in,
                const std::filesystem::path& a_out,
                const std::filesystem::path& b_in,
                const std::filesystem::path& b_out, const Context& ctx) {
  log::info("cavks {} (compare)", version_string);
  auto [rho_a_in, rho_a_out] = common_grid(
      read_density_grid(a_in), read_density_grid(a_out), "pair a");
  auto [rho_b_in, rho_b_out] = common_grid(
      read_density_grid(b_in), read_density_grid(b_out), "pair b");

  ScalarField delta_a = delta_rho(rho_a_in, rho_a_out);
  ScalarField delta_b = delta_rho(rho_b_in, rho_b_out);
  auto [da, db] = common_grid(std::move(delta_a), std::move(delta_b),
                              "pair a vs pair b");

  const double i_value = i_metric(da, db);
  fmt::print("I={:.12g} max_abs_delta_a={:.12g} max_abs_delta_b={:.12g}\n",
             i_value, da.max_abs(), db.max_abs());

  const auto out_dir = prepare_out_dir(ctx);
  write_density_grid(out_dir / "delta_rho_a.grid", da,
                     fmt::format("# cavks {} delta rho (pair a)", version_string));
  write_density_grid(out_dir / "delta_rho_b.grid", db,
                     fmt::format("# cavks {} delta rho (pair b)", version_string));
  write_axis_cuts(out_dir, da, "_a");
  write_axis_cuts(out_dir, db, "_b");
  return exit_ok;
}

int cmd_deltarho(const std::filesystem::path& rho_in,
                 const std::filesystem::path& rho_out, const Context& ctx) {
  log::info("cavks {} (deltarho)", version_string);
  auto [in_f, out_f] = common_grid(read_density_grid(rho_in),
                                   read_density_grid(rho_out), "density pair");
  const ScalarField delta = delta_rho(in_f, out_f);
  fmt::print("max_abs_delta={:.12g} total_charge_delta={:.12g}\n",
             delta.max_abs(), integrate(delta));

  const auto out_dir = prepare_out_dir(ctx);
  write_density_grid(out_dir / "delta_rho.grid", delta,
                     fmt::format("# cavks {} delta rho", version_string));
  write_axis_cuts(out_dir, delta, "");
  return exit_ok;
}

} // namespace cavks::cli

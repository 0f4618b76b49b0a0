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

#include <fmt/core.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace cavks {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

class KeyMap {
public:
  void insert(const std::string& key, const std::string& value, int line) {
    if (entries_.contains(key))
      throw ConfigError(fmt::format("duplicate config key '{}' (line {})", key, line));
    entries_[key] = value;
  }

  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string v = it->second;
    entries_.erase(it);
    return v;
  }

  bool contains(const std::string& key) const { return entries_.contains(key); }

  void reject_leftovers() const {
    if (entries_.empty()) return;
    std::string keys;
    for (const auto& [k, v] : entries_) keys += (keys.empty() ? "" : ", ") + k;
    throw ConfigError(fmt::format("unknown config key(s): {}", keys));
  }

private:
  std::map<std::string, std::string> entries_;
};

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not a number", key, value));
  }
}

long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("config key '{}': '{}' is not an integer", key, value));
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "on" || value == "1" || value == "yes")
    return true;
  if (value == "false" || value == "off" || value == "0" || value == "no")
    return false;
  throw ConfigError(fmt::format("config key '{}': '{}' is not a boolean", key, value));
}

std::vector<Nucleus> parse_nuclei(const std::string& value) {
  // syntax: [{x, y, z, Z, a}, {x, y, z, Z, a}, ...]
  std::vector<Nucleus> nuclei;
  std::string_view s = value;
  auto fail = [&](std::string_view why) -> ConfigError {
    return ConfigError(fmt::format(
        "system.nuclei: {} (expected [{{x,y,z,Z,a}}, ...], got '{}')", why, value));
  };
  auto skip_ws = [&] {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  };
  skip_ws();
  if (s.empty() || s.front() != '[') throw fail("missing '['");
  s.remove_prefix(1);
  skip_ws();
  if (!s.empty() && s.front() == ']') return nuclei; // empty list
  while (true) {
    skip_ws();
    if (s.empty() || s.front() != '{') throw fail("missing '{'");
    s.remove_prefix(1);
    const auto close = s.find('}');
    if (close == std::string_view::npos) throw fail("missing '}'");
    std::string body(s.substr(0, close));
    s.remove_prefix(close + 1);
    std::replace(body.begin(), body.end(), ',', ' ');
    std::istringstream ss(body);
    Nucleus nuc;
    if (!(ss >> nuc.position[0] >> nuc.position[1] >> nuc.position[2] >>
          nuc.charge >> nuc.softening))
      throw fail("each nucleus needs five numbers {x,y,z,Z,a}");
    double extra;
    if (ss >> extra) throw fail("each nucleus takes exactly five numbers");
    if (!(nuc.softening > 0.0)) throw fail("softening a must be positive");
    nuclei.push_back(nuc);
    skip_ws();
    if (!s.empty() && s.front() == ',') {
      s.remove_prefix(1);
      continue;
    }
    break;
  }
  skip_ws();
  if (s.empty() || s.front() != ']') throw fail("missing ']'");
  s.remove_prefix(1);
  skip_ws();
  if (!s.empty()) throw fail("trailing characters after ']'");
  return nuclei;
}

Direction parse_polarization(const std::string& value) {
  if (value == "x") return Direction::x();
  if (value == "y") return Direction::y();
  if (value == "z") return Direction::z();
  std::string body = value;
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream ss(body);
  double cx, cy, cz;
  if (!(ss >> cx >> cy >> cz))
    throw ConfigError(fmt::format(
        "cavity.polarization must be x, y, z or 'cx,cy,cz' (got '{}')", value));
  double extra;
  if (ss >> extra)
    throw ConfigError("cavity.polarization takes exactly three components");
  return Direction(cx, cy, cz);
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::string body = value;
  std::replace(body.begin(), body.end(), ',', ' ');
  std::istringstream ss(body);
  std::vector<int> out;
  long v;
  while (ss >> v) out.push_back(static_cast<int>(v));
  if (out.empty() || !ss.eof())
    throw ConfigError(fmt::format(
        "config key '{}': '{}' is not a comma-separated integer list", key, value));
  return out;
}

} // namespace

RunConfig RunConfig::parse_string(const std::string& text) {
  KeyMap map;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    const std::string trimmed = trim(line);
    if (trimmed.empty()) continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError(fmt::format(
          "config line {} is not of the form 'key = value': '{}'", lineno, trimmed));
    const std::string key = trim(trimmed.substr(0, eq));
    const std::string value = trim(trimmed.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError(fmt::format("config line {} has an empty key or value", lineno));
    map.insert(key, value, lineno);
  }

  RunConfig cfg;

  if (auto v = map.take("system.nuclei")) cfg.nuclei = parse_nuclei(*v);
  if (auto v = map.take("system.n_electrons")) {
    const long n = parse_int("system.n_electrons", *v);
    if (n < 1) throw ConfigError("system.n_electrons must be at least 1");
    cfg.n_electrons = static_cast<int>(n);
  }
  if (auto v = map.take("system.interactions"))
    cfg.interactions = parse_bool("system.interactions", *v);

  if (auto v = map.take("grid.half_width_bohr"))
    cfg.grid_half_width = parse_double("grid.half_width_bohr", *v);
  if (auto v = map.take("grid.spacing_bohr"))
    cfg.grid_spacing = parse_double("grid.spacing_bohr", *v);

  const auto omega_ev = map.take("cavity.omega_ev");
  const auto omega_ha = map.take("cavity.omega_ha");
  if (omega_ev && omega_ha)
    throw ConfigError(
        "give exactly one of cavity.omega_ev and cavity.omega_ha, not both");
  if (omega_ev) cfg.omega_ha = ev_to_hartree(parse_double("cavity.omega_ev", *omega_ev));
  if (omega_ha) cfg.omega_ha = parse_double("cavity.omega_ha", *omega_ha);
  if (auto v = map.take("cavity.lambda")) {
    cfg.lambda = parse_double("cavity.lambda", *v);
    if (cfg.lambda < 0.0) throw ConfigError("cavity.lambda must be nonnegative");
    if (!cfg.omega_ha)
      throw ConfigError(
          "cavity.lambda without a frequency: set cavity.omega_ev or cavity.omega_ha");
  }
  if (auto v = map.take("cavity.polarization")) {
    if (!cfg.omega_ha)
      throw ConfigError(
          "cavity.polarization without a frequency: set cavity.omega_ev or "
          "cavity.omega_ha");
    cfg.polarization = parse_polarization(*v);
  }

  if (auto v = map.take("xc.choice")) cfg.xc = xc_choice_from_string(*v);
  if (auto v = map.take("pxc.enabled")) cfg.pxc_enabled = parse_bool("pxc.enabled", *v);
  if (auto v = map.take("pxc.eta_c")) {
    cfg.eta_c = parse_double("pxc.eta_c", *v);
    if (cfg.eta_c < 0.0) throw ConfigError("pxc.eta_c must be nonnegative");
  }
  if (auto v = map.take("pxc.density_floor")) {
    cfg.density_floor = parse_double("pxc.density_floor", *v);
    if (cfg.density_floor < 0.0)
      throw ConfigError("pxc.density_floor must be nonnegative");
  }

  if (auto v = map.take("scf.mixing")) {
    if (*v == "linear")
      cfg.mixing = MixingKind::linear;
    else if (*v == "pulay")
      cfg.mixing = MixingKind::pulay;
    else
      throw ConfigError(fmt::format("scf.mixing must be linear or pulay (got '{}')", *v));
  }
  if (auto v = map.take("scf.alpha")) cfg.scf_alpha = parse_double("scf.alpha", *v);
  if (auto v = map.take("scf.pulay_depth"))
    cfg.pulay_depth = static_cast<int>(parse_int("scf.pulay_depth", *v));
  if (auto v = map.take("scf.max_iter"))
    cfg.scf_max_iter = static_cast<int>(parse_int("scf.max_iter", *v));
  if (auto v = map.take("scf.tol_density"))
    cfg.tol_density = parse_double("scf.tol_density", *v);
  if (auto v = map.take("scf.tol_eig")) cfg.tol_eig = parse_double("scf.tol_eig", *v);
  if (auto v = map.take("scf.eig_tol")) cfg.eig_tol = parse_double("scf.eig_tol", *v);
  if (auto v = map.take("scf.eig_max_iter"))
    cfg.eig_max_iter = static_cast<int>(parse_int("scf.eig_max_iter", *v));

  if (auto v = map.take("oracle.n_max"))
    cfg.oracle_n_max = static_cast<int>(parse_int("oracle.n_max", *v));
  if (auto v = map.take("oracle.eig_tol"))
    cfg.oracle_eig_tol = parse_double("oracle.eig_tol", *v);
  if (auto v = map.take("oracle.n_max_list"))
    cfg.oracle_n_max_list = parse_int_list("oracle.n_max_list", *v);
  if (auto v = map.take("oracle.max_basis"))
    cfg.oracle_max_basis = static_cast<int>(parse_int("oracle.max_basis", *v));

  if (auto v = map.take("scan.eta_min")) cfg.scan.eta_min = parse_double("scan.eta_min", *v);
  if (auto v = map.take("scan.eta_max")) cfg.scan.eta_max = parse_double("scan.eta_max", *v);
  if (auto v = map.take("scan.step")) cfg.scan.step = parse_double("scan.step", *v);
  if (auto v = map.take("scan.max_stages"))
    cfg.scan.max_stages = static_cast<int>(parse_int("scan.max_stages", *v));
  if (auto v = map.take("scan.threads"))
    cfg.scan.threads = static_cast<int>(parse_int("scan.threads", *v));

  if (auto v = map.take("calibrate.reference")) {
    if (*v == "oracle")
      cfg.reference = ReferenceSource::oracle;
    else if (*v == "files")
      cfg.reference = ReferenceSource::files;
    else
      throw ConfigError(fmt::format(
          "calibrate.reference must be oracle or files (got '{}')", *v));
  }
  if (auto v = map.take("calibrate.ref_in")) cfg.reference_in = *v;
  if (auto v = map.take("calibrate.ref_out")) cfg.reference_out = *v;
  if (auto v = map.take("calibrate.decimate"))
    cfg.calibrate_decimate = static_cast<int>(parse_int("calibrate.decimate", *v));

  if (auto v = map.take("seed"))
    cfg.seed = static_cast<std::uint64_t>(parse_int("seed", *v));

  map.reject_leftovers();

  if (cfg.reference == ReferenceSource::files) {
    for (const auto& p : {cfg.reference_in, cfg.reference_out}) {
      if (p.empty())
        throw ConfigError(
            "calibrate.reference = files needs calibrate.ref_in and calibrate.ref_out");
      if (!std::filesystem::exists(p))
        throw ConfigError(fmt::format("input file '{}' does not exist", p.string()));
    }
  }
  return cfg;
}

RunConfig RunConfig::parse_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError(fmt::format("cannot open config file '{}'", path.string()));
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_string(buffer.str());
}

std::string RunConfig::describe() const {
  std::string out;
  auto add = [&out](std::string_view key, const std::string& value) {
    out += fmt::format("{} = {}\n", key, value);
  };
  std::string nuc = "[";
  for (std::size_t i = 0; i < nuclei.size(); ++i) {
    const auto& n = nuclei[i];
    nuc += fmt::format("{}{{{:.17g}, {:.17g}, {:.17g}, {:.17g}, {:.17g}}}",
                       i ? ", " : "", n.position[0], n.position[1],
                       n.position[2], n.charge, n.softening);
  }
  nuc += "]";
  add("system.nuclei", nuc);
  add("system.n_electrons",
      n_electrons ? fmt::format("{}", *n_electrons) : "(unset)");
  add("system.interactions", interactions ? "on" : "off");
  add("grid.half_width_bohr", fmt::format("{:.17g}", grid_half_width));
  add("grid.spacing_bohr", fmt::format("{:.17g}", grid_spacing));
  add("cavity.omega_ha",
      omega_ha ? fmt::format("{:.17g}", *omega_ha) : "(no cavity)");
  add("cavity.lambda", fmt::format("{:.17g}", lambda));
  add("cavity.polarization",
      fmt::format("{:.17g},{:.17g},{:.17g}", polarization[0], polarization[1],
                  polarization[2]));
  add("xc.choice", std::string(to_string(xc)));
  add("pxc.enabled", pxc_enabled ? "true" : "false");
  add("pxc.eta_c", fmt::format("{:.17g}", eta_c));
  add("pxc.density_floor", fmt::format("{:.17g}", density_floor));
  add("scf.mixing", mixing == MixingKind::linear ? "linear" : "pulay");
  add("scf.alpha", fmt::format("{:.17g}", scf_alpha));
  add("scf.pulay_depth", fmt::format("{}", pulay_depth));
  add("scf.max_iter", fmt::format("{}", scf_max_iter));
  add("scf.tol_density", fmt::format("{:.17g}", tol_density));
  add("scf.tol_eig", fmt::format("{:.17g}", tol_eig));
  add("scf.eig_tol", fmt::format("{:.17g}", eig_tol));
  add("scf.eig_max_iter", fmt::format("{}", eig_max_iter));
  add("oracle.n_max", fmt::format("{}", oracle_n_max));
  add("oracle.eig_tol", fmt::format("{:.17g}", oracle_eig_tol));
  {
    std::string list;
    for (int n : effective_n_max_list()) list += fmt::format("{}{}", list.empty() ? "" : ",", n);
    add("oracle.n_max_list", list);
  }
  add("oracle.max_basis", fmt::format("{}", oracle_max_basis));
  add("scan.eta_min", fmt::format("{:.17g}", scan.eta_min));
  add("scan.eta_max", fmt::format("{:.17g}", scan.eta_max));
  add("scan.step", fmt::format("{:.17g}", scan.step));
  add("scan.max_stages", fmt::format("{}", scan.max_stages));
  add("scan.threads", fmt::format("{}", scan.threads));
  add("calibrate.reference",
      reference == ReferenceSource::oracle ? "oracle" : "files");
  if (reference == ReferenceSource::files) {
    add("calibrate.ref_in", reference_in.string());
    add("calibrate.ref_out", reference_out.string());
  }
  add("calibrate.decimate", fmt::format("{}", calibrate_decimate));
  add("seed", fmt::format("{}", seed));
  return out;
}

Grid RunConfig::make_grid() const {
  return Grid::from_half_width(grid_half_width, grid_spacing);
}

SystemSpec RunConfig::make_system(const Grid& grid) const {
  if (!n_electrons)
    throw ConfigError("missing required config key system.n_electrons");
  SystemSpec spec{nuclei, *n_electrons, grid, interactions};
  spec.validate();
  return spec;
}

std::vector<BareMode> RunConfig::make_modes() const {
  if (!omega_ha) return {};
  return {BareMode{*omega_ha, lambda, polarization}};
}

PxcParams RunConfig::make_pxc_params() const { return {eta_c, density_floor}; }

ScfOptions RunConfig::make_scf_options() const {
  ScfOptions opt;
  opt.mixing = mixing;
  opt.alpha = scf_alpha;
  opt.pulay_depth = pulay_depth;
  opt.max_iter = scf_max_iter;
  opt.tol_density = tol_density;
  opt.tol_eig = tol_eig;
  opt.eig_tol = eig_tol;
  opt.eig_max_iter = eig_max_iter;
  opt.pxc_enabled = pxc_enabled;
  return opt;
}

PFConfig RunConfig::make_pf_config(const Grid& grid) const {
  if (!omega_ha)
    throw ConfigError(
        "the oracle needs a cavity mode: set cavity.omega_ev or cavity.omega_ha");
  PFConfig cfg{SystemSpec{nuclei, 1, grid, false},
               dress(BareMode{*omega_ha, lambda, polarization}, 1),
               oracle_n_max,
               oracle_eig_tol,
               seed,
               oracle_max_basis,
               50000};
  return cfg;
}

std::vector<int> RunConfig::effective_n_max_list() const {
  if (!oracle_n_max_list.empty()) return oracle_n_max_list;
  return {oracle_n_max};
}

} // namespace cavks

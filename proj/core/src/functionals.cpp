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

#include "cavks/functionals.hpp"

#include "cavks/errors.hpp"
#include "cavks/field_ops.hpp"

#include <fmt/core.h>

#include <cmath>
#include <numbers>

namespace cavks {

XcChoice xc_choice_from_string(std::string_view name) {
  if (name == "none") return XcChoice::none;
  if (name == "slater_exchange_only") return XcChoice::slater_exchange_only;
  if (name == "lda_pz81") return XcChoice::lda_pz81;
  throw ConfigError(fmt::format("unknown xc choice '{}'", name));
}

std::string_view to_string(XcChoice choice) {
  switch (choice) {
    case XcChoice::none: return "none";
    case XcChoice::slater_exchange_only: return "slater_exchange_only";
    case XcChoice::lda_pz81: return "lda_pz81";
  }
  return "?";
}

double pz81_correlation_potential(double rho) {
  if (rho <= 0.0) return 0.0;
  // Perdew-Zunger 1981 parametrization of the Ceperley-Alder gas,
  // unpolarized branch, published constants.
  constexpr double A = 0.0311, B = -0.048, C = 0.0020, D = -0.0116;
  constexpr double gamma = -0.1423, beta1 = 1.0529, beta2 = 0.3334;
  // rs = (3 / (4 pi rho))^(1/3)
  const double rs = 0.6203504908994001 / std::cbrt(rho);
  if (rs < 1.0) {
    const double lnrs = std::log(rs);
    return A * lnrs + (B - A / 3.0) + (2.0 / 3.0) * C * rs * lnrs +
           ((2.0 * D - C) / 3.0) * rs;
  }
  const double sq = std::sqrt(rs);
  const double den = 1.0 + beta1 * sq + beta2 * rs;
  const double ec = gamma / den;
  return ec * (1.0 + (7.0 / 6.0) * beta1 * sq + (4.0 / 3.0) * beta2 * rs) / den;
}

ScalarField lda_xc_potential(const ScalarField& rho, XcChoice choice) {
  ScalarField v(rho.grid());
  if (choice == XcChoice::none) return v;

  const double cx = std::cbrt(3.0 / std::numbers::pi);
  const bool with_correlation = choice == XcChoice::lda_pz81;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i];
    if (r <= 0.0) continue;
    double vv = -cx * std::cbrt(r);
    if (with_correlation) vv += pz81_correlation_potential(r);
    v[i] = vv;
  }
  return v;
}

ScalarField pxc_source(const ScalarField& rho, std::span<const DressedMode> modes,
                       const PxcParams& params) {
  if (params.eta_c < 0.0) throw ConfigError("eta_c must be nonnegative");
  if (params.density_floor < 0.0)
    throw ConfigError("density floor must be nonnegative");

  ScalarField out(rho.grid());
  if (params.eta_c == 0.0 || modes.empty()) return out;

  bool any_coupling = false;
  for (const auto& m : modes)
    if (m.lambda_tilde != 0.0) any_coupling = true;
  if (!any_coupling) return out;

  // s = (3 rho / 8 pi)^(2/3) with the density floor applied first
  ScalarField s(rho.grid());
  const double c = 3.0 / (8.0 * std::numbers::pi);
  for (std::size_t i = 0; i < rho.size(); ++i) {
    const double r = rho[i];
    if (r <= params.density_floor) continue;
    const double t = std::cbrt(c * r);
    s[i] = t * t;
  }

  for (const auto& mode : modes) {
    if (mode.lambda_tilde == 0.0) continue;
    if (!(mode.omega_tilde > 0.0))
      throw ConfigError("dressed mode frequency must be positive");
    const double weight = -params.eta_c * 2.0 * std::numbers::pi *
                          std::numbers::pi * mode.lambda_tilde *
                          mode.lambda_tilde /
                          (mode.omega_tilde * mode.omega_tilde);
    ScalarField term = directional_second_derivative(s, mode.epsilon);
    term *= weight;
    out += term;
  }
  return out;
}

ScalarField pxc_potential(const ScalarField& rho,
                          std::span<const DressedMode> modes,
                          const PxcParams& params, const PoissonSolver& solver,
                          bool force) {
  return solver.solve_free_space(pxc_source(rho, modes, params), force);
}

} // namespace cavks

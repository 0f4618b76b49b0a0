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

#include "cavks/cavity.hpp"

#include "cavks/errors.hpp"

#include <cmath>

namespace cavks {

double ev_to_hartree(double ev) { return ev / hartree_in_ev; }

DressedMode dress(const BareMode& mode, int n_electrons) {
  if (!(mode.omega > 0.0)) throw ConfigError("bare mode frequency must be positive");
  if (mode.lambda < 0.0) throw ConfigError("mode strength must be nonnegative");
  if (n_electrons < 1) throw ConfigError("dressing needs at least one electron");
  DressedMode dressed;
  dressed.omega_tilde =
      std::sqrt(mode.omega * mode.omega + n_electrons * mode.lambda * mode.lambda);
  dressed.lambda_tilde = mode.lambda;
  dressed.epsilon = mode.epsilon;
  return dressed;
}

std::vector<DressedMode> dress_all(const std::vector<BareMode>& modes,
                                   int n_electrons) {
  // Each mode is dressed independently with the same electron count; the
  // single-mode relation is applied per mode.
  std::vector<DressedMode> out;
  out.reserve(modes.size());
  for (const auto& m : modes) out.push_back(dress(m, n_electrons));
  return out;
}

double collective_coupling(const DressedMode& mode, int n_electrons) {
  return n_electrons * mode.lambda_tilde * mode.lambda_tilde /
         (mode.omega_tilde * mode.omega_tilde);
}

} // namespace cavks

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

#include "cavks/errors.hpp"
#include "cavks/grid.hpp"

#include <functional>
#include <vector>

namespace cavks {

/// In-cavity / cavity-free densities and their difference.
struct DensityPair {
  ScalarField rho_in;
  ScalarField rho_out;
  ScalarField delta; // rho_in - rho_out

  static DensityPair make(ScalarField rho_in, ScalarField rho_out);
};

/// Pointwise rho_in - rho_out; both fields must share a grid and be
/// nonnegative (within -1e-12).
ScalarField delta_rho(const ScalarField& rho_in, const ScalarField& rho_out);

/// Normalized squared difference
///   I = integral (a-b)^2 / (integral a^2 + integral b^2),
/// 0 = perfect agreement, 1 = zero overlap; anti-correlated fields reach 2.
/// Undefined (error) when both inputs are identically zero.
double i_metric(const ScalarField& a, const ScalarField& b);

struct ScanOptions {
  double eta_min = 0.0;
  double eta_max = 1.5;
  double step = 0.1;     // coarse stage step
  int max_stages = 4;    // coarse stage + refinements
  double min_rel_improvement = 1e-3;
  int threads = 1;       // scan points per stage may run concurrently
};

struct ScanPoint {
  int stage = 0;
  double eta_c = 0.0;
  double i_value = 0.0;
};

struct ScanStage {
  int stage = 0;
  double step = 0.0;
  double eta_lo = 0.0;
  double eta_hi = 0.0;
  double best_eta = 0.0; // best over all evaluations so far
  double best_i = 0.0;
};

struct CalibrationResult {
  std::vector<ScanPoint> scan; // every evaluated point, in stage/eta order
  double eta_star = 0.0;
  double i_star = 0.0;
  std::vector<ScanStage> refinement_trace;
};

class CalibrationAbort : public NumericalError {
public:
  CalibrationAbort(const std::string& what, CalibrationResult partial)
      : NumericalError(what), partial(std::move(partial)) {}
  CalibrationResult partial;
};

/// Produces the in/out density pair for one renormalization factor.
using PairRunner = std::function<DensityPair(double eta_c)>;

/// Coarse scan over [eta_min, eta_max], then repeated refinement around the
/// running minimum with step 0.1 * eta until the relative improvement in I
/// drops below min_rel_improvement (at most max_stages stages). Deterministic
/// for a deterministic runner, regardless of thread count.
CalibrationResult calibrate_eta(const DensityPair& reference,
                                const PairRunner& runner,
                                const ScanOptions& options = {});

} // namespace cavks

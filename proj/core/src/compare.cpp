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

#include "cavks/compare.hpp"

#include "cavks/field_ops.hpp"
#include "cavks/log.hpp"

#include <fmt/core.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <map>
#include <optional>
#include <thread>

namespace cavks {

DensityPair DensityPair::make(ScalarField rho_in, ScalarField rho_out) {
  ScalarField delta = delta_rho(rho_in, rho_out);
  const double mismatch = std::abs(integrate(delta));
  if (mismatch > 1e-8)
    log::warn("density pair: in/out densities integrate to different charges "
              "(difference {:.3e})",
              mismatch);
  return DensityPair{std::move(rho_in), std::move(rho_out), std::move(delta)};
}

ScalarField delta_rho(const ScalarField& rho_in, const ScalarField& rho_out) {
  if (rho_in.grid() != rho_out.grid())
    throw ConfigError("delta rho requires both densities on the same grid");
  if (rho_in.min_value() < -1e-12 || rho_out.min_value() < -1e-12)
    throw ConfigError("delta rho inputs must be nonnegative densities");
  ScalarField delta = rho_in;
  delta -= rho_out;
  return delta;
}

double i_metric(const ScalarField& a, const ScalarField& b) {
  if (a.grid() != b.grid())
    throw ConfigError("the I metric requires both fields on the same grid");
  double num = 0.0, na = 0.0, nb = 0.0;
  const auto& av = a.values();
  const auto& bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) {
    const double d = av[i] - bv[i];
    num += d * d;
    na += av[i] * av[i];
    nb += bv[i] * bv[i];
  }
  if (na + nb == 0.0)
    throw ConfigError("the I metric is undefined for two identically zero fields");
  return num / (na + nb);
}

namespace {

class ScanEvaluator {
public:
  ScanEvaluator(const DensityPair& reference, const PairRunner& runner,
                int threads)
      : reference_(reference), runner_(runner), threads_(std::max(1, threads)) {}

  // Evaluates I for every eta not in the cache; returns each requested eta's
  // I value. Results are merged in eta order regardless of thread count.
  std::vector<double> evaluate(const std::vector<double>& etas, int stage,
                               std::vector<ScanPoint>& scan) {
    std::vector<double> todo;
    for (double eta : etas)
      if (!cache_.contains(eta)) todo.push_back(eta);

    std::vector<std::optional<double>> results(todo.size());
    std::vector<std::exception_ptr> errors(todo.size());
    if (threads_ == 1 || todo.size() <= 1) {
      for (std::size_t i = 0; i < todo.size(); ++i) run_one(todo, i, results, errors);
    } else {
      std::atomic<std::size_t> next{0};
      const int team = std::min<std::size_t>(threads_, todo.size());
      std::vector<std::thread> workers;
      workers.reserve(team);
      for (int t = 0; t < team; ++t)
        workers.emplace_back([&] {
          for (std::size_t i = next.fetch_add(1); i < todo.size();
               i = next.fetch_add(1))
            run_one(todo, i, results, errors);
        });
      for (auto& w : workers) w.join();
    }

    // record completed points (eta order) before surfacing any failure
    for (std::size_t i = 0; i < todo.size(); ++i)
      if (results[i]) cache_[todo[i]] = *results[i];
    std::vector<double> out;
    for (double eta : etas) {
      auto it = cache_.find(eta);
      if (it == cache_.end()) continue;
      if (!recorded_.contains(eta)) {
        scan.push_back({stage, eta, it->second});
        recorded_.insert({eta, stage});
      }
      out.push_back(it->second);
    }
    for (std::size_t i = 0; i < todo.size(); ++i)
      if (errors[i]) std::rethrow_exception(errors[i]);
    return out;
  }

  double cached(double eta) const { return cache_.at(eta); }
  bool has(double eta) const { return cache_.contains(eta); }

private:
  void run_one(const std::vector<double>& todo, std::size_t i,
               std::vector<std::optional<double>>& results,
               std::vector<std::exception_ptr>& errors) {
    try {
      const DensityPair pair = runner_(todo[i]);
      results[i] = i_metric(reference_.delta, pair.delta);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }

  const DensityPair& reference_;
  const PairRunner& runner_;
  int threads_;
  std::map<double, double> cache_;
  std::map<double, int> recorded_;
};

std::vector<double> linear_etas(double lo, double hi, double step) {
  std::vector<double> etas;
  for (int j = 0;; ++j) {
    const double eta = lo + j * step;
    if (eta > hi + 1e-12) break;
    etas.push_back(std::min(eta, hi));
  }
  return etas;
}

} // namespace

CalibrationResult calibrate_eta(const DensityPair& reference,
                                const PairRunner& runner,
                                const ScanOptions& options) {
  if (reference.delta.max_abs() == 0.0)
    throw ConfigError("calibration reference has an identically zero delta rho");
  if (!(options.step > 0.0) || options.eta_max < options.eta_min)
    throw ConfigError("calibration scan range or step is invalid");

  CalibrationResult result;
  ScanEvaluator evaluator(reference, runner, options.threads);

  auto best_of = [&](const std::vector<double>& etas,
                     const std::vector<double>& is) {
    std::size_t arg = 0;
    for (std::size_t i = 1; i < is.size(); ++i)
      if (is[i] < is[arg]) arg = i;
    return std::pair{etas[arg], is[arg]};
  };

  // stage 1: coarse linear scan
  std::vector<double> etas = linear_etas(options.eta_min, options.eta_max,
                                         options.step);
  std::vector<double> is;
  try {
    is = evaluator.evaluate(etas, 1, result.scan);
  } catch (const std::exception& e) {
    throw CalibrationAbort(
        fmt::format("calibration aborted in the coarse scan: {}", e.what()),
        std::move(result));
  }

  {
    const auto [lo, hi] =
        std::minmax_element(is.begin(), is.end());
    if (*hi - *lo < 1e-12)
      throw NumericalError(
          "calibration scan is flat: reference insensitive to eta_c");
  }

  auto [eta_star, i_star] = best_of(etas, is);
  result.refinement_trace.push_back(
      {1, options.step, etas.front(), etas.back(), eta_star, i_star});
  log::info("calibration stage 1: best eta_c {:.6g} with I {:.6e}", eta_star,
            i_star);

  double prev_step = options.step;
  for (int stage = 2; stage <= options.max_stages; ++stage) {
    // the paper's rule: rescan around the minimum with step 0.1 * eta
    double step = 0.1 * eta_star;
    if (step < 1e-12) step = 0.1 * prev_step;
    const double lo = std::max(options.eta_min, eta_star - 5.0 * step);
    const double hi = std::min(options.eta_max, eta_star + 5.0 * step);
    std::vector<double> stage_etas;
    for (int j = -5; j <= 5; ++j) {
      const double eta = eta_star + j * step;
      if (eta >= lo - 1e-15 && eta <= hi + 1e-15) stage_etas.push_back(eta);
    }

    std::vector<double> stage_is;
    try {
      stage_is = evaluator.evaluate(stage_etas, stage, result.scan);
    } catch (const std::exception& e) {
      result.eta_star = eta_star;
      result.i_star = i_star;
      throw CalibrationAbort(
          fmt::format("calibration aborted in stage {}: {}", stage, e.what()),
          std::move(result));
    }

    const auto [stage_eta, stage_i] = best_of(stage_etas, stage_is);
    const double improvement = (i_star - stage_i) / i_star;
    if (stage_i < i_star) {
      eta_star = stage_eta;
      i_star = stage_i;
    }
    result.refinement_trace.push_back({stage, step, lo, hi, eta_star, i_star});
    log::info("calibration stage {}: best eta_c {:.6g} with I {:.6e}", stage,
              eta_star, i_star);
    prev_step = step;
    if (i_star <= 0.0 || improvement <= options.min_rel_improvement) break;
  }

  result.eta_star = eta_star;
  result.i_star = i_star;
  return result;
}

} // namespace cavks

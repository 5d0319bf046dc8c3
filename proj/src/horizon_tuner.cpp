// Copyright 2026 The offset_track Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "offset_track/horizon_tuner.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <memory>
#include <ostream>

#include "offset_track/errors.hpp"
#include "offset_track/parallel.hpp"

namespace offset_track {

void TuneSpec::Validate() const {
  if (!(s_h_min > 0.0 && s_h_max >= s_h_min)) {
    throw InvalidArgument("horizon range must satisfy 0 < min <= max");
  }
  if (!(step > 0.0)) throw InvalidArgument("horizon step must be positive");
  if (!(target_delta_s > 0.0)) throw InvalidArgument("delta_s must be positive");
  if (!(velocity > 0.0)) throw InvalidArgument("velocity must be positive");
  if (training_paths.empty()) throw InvalidArgument("no training paths");
  for (const PathModel& path : training_paths) {
    if (path.role() != PathRole::kTraining) {
      throw InvalidArgument("tuner accepts only training-tagged paths");
    }
    if (!offset_feasible_for(path, offset)) {
      throw FeasibilityError("offset infeasible on a training path",
                             path.MaxAbsCurvature());
    }
  }
}

std::vector<double> TuneSpec::Grid() const {
  const auto n = static_cast<std::size_t>(std::floor((s_h_max - s_h_min) / step + 1e-9));
  std::vector<double> grid(n + 1);
  // Index-based so that the grid is exact regardless of accumulation error.
  for (std::size_t i = 0; i <= n; ++i) grid[i] = s_h_min + static_cast<double>(i) * step;
  return grid;
}

TuneResult tune(const TuneSpec& spec, const SweepBase& base) {
  spec.Validate();
  const std::vector<double> grid = spec.Grid();
  TuneResult result;
  result.curve.resize(grid.size());
  std::vector<std::string> failures(grid.size());

  parallel_for(grid.size(), [&](std::size_t i) {
    CurvePoint& point = result.curve[i];
    point.s_h = grid[i];
    double sum_sq = 0.0;
    std::size_t count = 0;
    try {
      SweepBase b = base;
      b.controller.kind = ControllerKind::kPredictive;
      b.controller.predictive =
          PredictiveGains::WithHorizon(base.controller.predictive.lambda,
                                       base.controller.predictive.k_psi,
                                       grid[i], spec.target_delta_s);
      for (const PathModel& path : spec.training_paths) {
        for (int mirror = 0; mirror < (spec.mirror_balanced ? 2 : 1); ++mirror) {
          Scenario sc;
          sc.path = std::make_shared<const PathModel>(mirror ? path.Mirrored() : path);
          sc.plant = b.plant;
          sc.controller = b.controller;
          sc.offset = spec.offset;
          sc.vehicle = b.vehicle;
          sc.vehicle.speed = spec.velocity;
          sc.sim = b.sim;
          sc.seed = b.seed;
          const RunLog log = simulate(sc);
          if (log.aborted) throw Error("run aborted: " + log.abort_reason);
          for (const LogRecord& r : log.records) sum_sq += r.e_true * r.e_true;
          count += log.records.size();
        }
      }
      if (count == 0) throw Error("no samples");
      point.rmse = std::sqrt(sum_sq / static_cast<double>(count));
    } catch (const std::exception& e) {
      point.failed = true;
      point.rmse = std::numeric_limits<double>::quiet_NaN();
      failures[i] = e.what();
    }
  });

  bool found = false;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const CurvePoint& p = result.curve[i];
    if (p.failed) {
      result.warnings.push_back("s_h=" + std::to_string(p.s_h) +
                                " excluded: " + failures[i]);
      continue;
    }
    // Strict comparison keeps the smaller s_h on ties.
    if (!found || p.rmse < result.rmse_star) {
      result.s_h_star = p.s_h;
      result.rmse_star = p.rmse;
      found = true;
    }
  }
  if (!found) throw TuningError("every grid point failed");
  return result;
}

double flat_interval_length(const TuneResult& result, double tolerance) {
  const double limit = result.rmse_star * (1.0 + tolerance);
  std::size_t star = 0;
  while (star < result.curve.size() && result.curve[star].s_h != result.s_h_star) ++star;
  if (star == result.curve.size()) return 0.0;
  auto ok = [&](std::size_t i) {
    return !result.curve[i].failed && result.curve[i].rmse <= limit;
  };
  std::size_t lo = star;
  std::size_t hi = star;
  while (lo > 0 && ok(lo - 1)) --lo;
  while (hi + 1 < result.curve.size() && ok(hi + 1)) ++hi;
  return result.curve[hi].s_h - result.curve[lo].s_h;
}

void write_curve_csv(const TuneResult& result, std::ostream& out) {
  out << "s_h_m,rmse_m\n" << std::setprecision(10);
  for (const CurvePoint& p : result.curve) {
    out << p.s_h << ',';
    if (p.failed) {
      out << "nan";
    } else {
      out << p.rmse;
    }
    out << '\n';
  }
}

}  // namespace offset_track

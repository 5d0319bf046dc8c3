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

#include "offset_track/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <limits>
#include <random>
#include <utility>

#include "offset_track/errors.hpp"
#include "offset_track/parallel.hpp"

namespace offset_track {
namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

ControlCommand Dispatch(const ControllerConfig& cfg, const ControlMeasurement& meas,
                        const PathModel& path, const ImplementOffset& offset,
                        const VehicleParams& vehicle, double previous) {
  switch (cfg.kind) {
    case ControllerKind::kPredictive:
      return predictive_control(meas, path, cfg.predictive, offset, vehicle, previous);
    case ControllerKind::kBackstepping:
      return backstepping_control(meas, path, cfg.backstepping, offset, vehicle,
                                  previous);
    case ControllerKind::kLateralServoing:
      return lateral_servoing_control(meas, path, cfg.servoing, offset, vehicle,
                                      previous);
  }
  throw InvalidArgument("unknown controller");
}

double StartAbscissa(const Scenario& sc) {
  if (sc.initial_s >= 0.0) return sc.initial_s;
  return std::max(0.0, -sc.offset.longitudinal);
}

double StopAbscissa(const Scenario& sc) {
  if (sc.stop_s >= 0.0) return sc.stop_s;
  return sc.path->total_length() - std::max(1.0, sc.offset.longitudinal + 1.0);
}

}  // namespace

const char* controller_name(ControllerKind kind) {
  switch (kind) {
    case ControllerKind::kPredictive:
      return "predictive";
    case ControllerKind::kBackstepping:
      return "backstepping";
    case ControllerKind::kLateralServoing:
      return "lateral_servoing";
  }
  return "unknown";
}

ControllerKind parse_controller(const std::string& name) {
  if (name == "predictive") return ControllerKind::kPredictive;
  if (name == "backstepping") return ControllerKind::kBackstepping;
  if (name == "lateral_servoing") return ControllerKind::kLateralServoing;
  throw InvalidArgument("unknown controller '" + name + "'");
}

void validate_scenario(const Scenario& sc) {
  if (!sc.path) throw InvalidArgument("scenario has no path");
  sc.vehicle.Validate(sc.path->min_turning_radius());
  if (!(sc.sim.dt > 0.0 && sc.sim.dt <= 0.1)) {
    throw InvalidArgument("physics dt must lie in (0, 0.1]");
  }
  if (!(sc.sim.control_period >= sc.sim.dt)) {
    throw InvalidArgument("control period must be >= physics dt");
  }
  if (!(sc.sim.observer.g_y > 0.0 && sc.sim.observer.g_psi > 0.0)) {
    throw InvalidArgument("observer gains must be positive");
  }
  switch (sc.controller.kind) {
    case ControllerKind::kPredictive:
      sc.controller.predictive.Validate();
      break;
    case ControllerKind::kBackstepping:
      sc.controller.backstepping.Validate();
      break;
    case ControllerKind::kLateralServoing:
      sc.controller.servoing.Validate();
      break;
  }
  if (!offset_feasible_for(*sc.path, sc.offset)) {
    throw FeasibilityError("implement offset infeasible for the path curvature",
                           sc.path->MaxAbsCurvature());
  }
  if (!(StopAbscissa(sc) > StartAbscissa(sc))) {
    throw InvalidArgument("path too short for the implement offset");
  }
}

RunLog simulate(const Scenario& sc) {
  validate_scenario(sc);
  const PathModel& path = *sc.path;
  const VehicleParams& vehicle = sc.vehicle;
  const double v = vehicle.speed;
  const int hold_steps =
      std::max(1, static_cast<int>(std::lround(sc.sim.control_period / sc.sim.dt)));
  const double control_dt = hold_steps * sc.sim.dt;

  const double s0 = StartAbscissa(sc);
  const double stop = StopAbscissa(sc);
  const Point2 start = frenet_to_world(path, s0, -sc.offset.lateral +
                                                     sc.initial_lateral_shift);
  PlantState st;
  st.pose = {start.x, start.y, path.PoseAt(s0).heading + sc.initial_heading_error};
  if (std::holds_alternative<DynamicSingleTrack>(sc.plant)) {
    st.sideslip = dynamic_slip(st, vehicle);
  }

  RunLog log;
  log.sample_period = control_dt;
  ObserverState obs;
  obs.gains = sc.sim.observer;
  double s_hint = s0;
  double delta_cmd = 0.0;
  const double t_max = 3.0 * (stop - s0) / v + 20.0;

  for (std::size_t step = 0;; ++step) {
    if (step % hold_steps == 0) {
      PathMatch m;
      MatchOptions robot_match{sc.sim.corridor, s_hint};
      try {
        m = match_to_path(path, st.pose, robot_match);
      } catch (const MatchingError& e) {
        log.aborted = true;
        log.abort_reason = e.what();
        break;
      }
      const FrenetState& f = m.state;
      s_hint = f.s;
      if (f.s >= stop) break;
      if (st.t > t_max) {
        log.events.push_back({step, "time limit reached before the stop abscissa"});
        break;
      }
      const double c = curvature_at(path, f.s);

      SideslipState slip_hat;
      if (sc.sim.use_observer) {
        obs = observer_step(obs, f, st.delta_actual, v, c, control_dt,
                            vehicle.wheelbase);
        if (obs.frozen) log.events.push_back({step, "observer frozen"});
        slip_hat = obs.Estimate(f.psi_tilde, v);
      }
      const ControlMeasurement meas{f, st.yaw_rate, slip_hat};
      const ControlCommand cmd =
          Dispatch(sc.controller, meas, path, sc.offset, vehicle, delta_cmd);
      if (cmd.held) log.events.push_back({step, cmd.fault});
      delta_cmd = cmd.delta;

      LogRecord rec;
      rec.t = st.t;
      rec.s = f.s;
      rec.x = st.pose.x;
      rec.y = st.pose.y;
      rec.heading = st.pose.heading;
      rec.delta_cmd = delta_cmd;
      rec.delta_actual = st.delta_actual;
      rec.y_err = f.y;
      rec.psi_err = f.psi_tilde;
      if (!cmd.held) {
        rec.e_I = cmd.e_I;
      } else {
        try {
          rec.e_I = implement_error(f, c, sc.offset).e_I;
        } catch (const Error&) {
          rec.e_I = std::numeric_limits<double>::quiet_NaN();
        }
      }
      try {
        const MatchOptions implement_match{
            sc.sim.corridor,
            std::clamp(f.s + sc.offset.longitudinal, 0.0, path.total_length())};
        rec.e_true = true_implement_error(
            path, implement_world_position(st.pose, sc.offset), implement_match);
      } catch (const MatchingError& e) {
        log.aborted = true;
        log.abort_reason = std::string("implement ") + e.what();
        break;
      }
      rec.beta_r_true = st.sideslip.beta_r;
      rec.beta_f_true = st.sideslip.beta_f;
      rec.beta_r_hat = slip_hat.beta_r;
      rec.beta_f_hat = slip_hat.beta_f;
      rec.curvature = c;
      log.records.push_back(rec);
    }
    st = plant_step(st, delta_cmd, sc.sim.dt, vehicle, sc.plant);
  }
  return log;
}

RunLog run(const Scenario& sc) {
  if (sc.path && sc.path->role() == PathRole::kTraining) {
    throw InvalidArgument("benchmark refuses training-tagged paths");
  }
  return simulate(sc);
}

const char* const kLogCsvHeader =
    "t_s,s_m,x_m,y_m,heading_rad,delta_cmd_rad,delta_act_rad,y_err_m,psi_err_rad,"
    "e_I_m,e_true_m,beta_r_true_rad,beta_f_true_rad,beta_r_hat_rad,beta_f_hat_rad,"
    "curvature_1pm";

void write_log_csv(const RunLog& log, std::ostream& out) {
  out << kLogCsvHeader << '\n' << std::setprecision(10);
  for (const LogRecord& r : log.records) {
    out << r.t << ',' << r.s << ',' << r.x << ',' << r.y << ',' << r.heading << ','
        << r.delta_cmd << ',' << r.delta_actual << ',' << r.y_err << ','
        << r.psi_err << ',' << r.e_I << ',' << r.e_true << ',' << r.beta_r_true
        << ',' << r.beta_f_true << ',' << r.beta_r_hat << ',' << r.beta_f_hat
        << ',' << r.curvature << '\n';
  }
}

const char* transition_name(TransitionKind kind) {
  switch (kind) {
    case TransitionKind::kLineToArc:
      return "line_to_arc";
    case TransitionKind::kArcToLine:
      return "arc_to_line";
    case TransitionKind::kArcToArcSameSign:
      return "arc_to_arc";
    case TransitionKind::kArcToArcSignFlip:
      return "arc_to_arc_flip";
  }
  return "unknown";
}

std::vector<Transition> transitions(const PathModel& path) {
  std::vector<Transition> out;
  const auto& segs = path.segments();
  for (std::size_t i = 1; i < segs.size(); ++i) {
    const Segment& a = segs[i - 1];
    const Segment& b = segs[i];
    TransitionKind kind;
    if (a.kind == SegmentKind::kLine && b.kind == SegmentKind::kLine) {
      continue;  // not a curvature discontinuity
    } else if (a.kind == SegmentKind::kLine) {
      kind = TransitionKind::kLineToArc;
    } else if (b.kind == SegmentKind::kLine) {
      kind = TransitionKind::kArcToLine;
    } else if (a.curvature * b.curvature < 0.0) {
      kind = TransitionKind::kArcToArcSignFlip;
    } else {
      kind = TransitionKind::kArcToArcSameSign;
    }
    out.push_back({i, path.segment_start(i), kind});
  }
  return out;
}

double percentile(std::vector<double> values, double p) {
  if (values.empty()) throw InvalidArgument("percentile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("percentile p outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double pos = p * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

MetricReport summarize(const std::vector<double>& errors) {
  if (errors.empty()) throw InvalidArgument("no samples to summarize");
  std::vector<double> abs_err(errors.size());
  std::transform(errors.begin(), errors.end(), abs_err.begin(),
                 [](double e) { return std::abs(e); });
  std::sort(abs_err.begin(), abs_err.end());
  MetricReport r;
  r.samples = abs_err.size();
  r.median = percentile(abs_err, 0.5);
  r.p25 = percentile(abs_err, 0.25);
  r.p75 = percentile(abs_err, 0.75);
  r.iqr = r.p75 - r.p25;
  r.max = abs_err.back();
  double sq = 0.0;
  for (double e : abs_err) sq += e * e;
  r.rmse = std::sqrt(sq / static_cast<double>(abs_err.size()));
  return r;
}

std::vector<double> abs_true_errors(const RunLog& log) {
  std::vector<double> out;
  out.reserve(log.records.size());
  for (const LogRecord& r : log.records) out.push_back(std::abs(r.e_true));
  return out;
}

MetricReport metrics(const RunLog& log, const PathModel& path) {
  if (log.records.empty()) throw InvalidArgument("empty run log");
  MetricReport r = summarize(abs_true_errors(log));
  for (const Transition& tr : transitions(path)) {
    TransitionMax tm{tr, 0.0, 0};
    for (const LogRecord& rec : log.records) {
      if (std::abs(rec.s - tr.s) <= kTransitionWindow) {
        tm.max_error = std::max(tm.max_error, std::abs(rec.e_true));
        ++tm.samples;
      }
    }
    r.transitions.push_back(tm);
  }
  return r;
}

PathModel build_validation_path() {
  const std::vector<SegmentSpec> specs{
      SegmentSpec::Line(40.0),
      SegmentSpec::Arc(15.0 * 90.0 * kDeg, 15.0),
      SegmentSpec::Line(25.0),
      SegmentSpec::Arc(12.0 * 120.0 * kDeg, -12.0),
      SegmentSpec::Arc(10.0 * 120.0 * kDeg, 10.0),
      SegmentSpec::Line(40.0),
  };
  return PathModel({0.0, 0.0, 0.0}, specs, PathRole::kEvaluation);
}

PathModel build_avoidance_path() {
  // Lateral jog of 3 m made of two opposite 10 m radius arcs.
  const double jog_radius = 10.0;
  const double jog_angle = std::acos(1.0 - 3.0 / (2.0 * jog_radius));
  const double jog_len = jog_radius * jog_angle;
  const double u_len = 6.0 * std::numbers::pi;
  const std::vector<SegmentSpec> specs{
      SegmentSpec::Line(50.0),
      SegmentSpec::Arc(u_len, 6.0),
      SegmentSpec::Line(20.0),
      SegmentSpec::Arc(jog_len, -jog_radius),
      SegmentSpec::Arc(jog_len, jog_radius),
      SegmentSpec::Line(10.0),
      SegmentSpec::Arc(jog_len, jog_radius),
      SegmentSpec::Arc(jog_len, -jog_radius),
      SegmentSpec::Line(20.0),
      SegmentSpec::Arc(u_len, -6.0),
  };
  return PathModel({0.0, 0.0, 0.0}, specs, PathRole::kEvaluation);
}

std::vector<PathModel> generate_suite(std::uint64_t seed, int n, PathRole role,
                                      const SuiteOptions& opt) {
  if (n < 1) throw InvalidArgument("suite size must be >= 1");
  std::mt19937_64 rng(seed);
  // Explicit mapping so the suite does not depend on the standard library's
  // distribution implementations.
  auto uniform = [&rng](double lo, double hi) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  };
  auto coin = [&rng] { return (rng() >> 63) != 0; };

  std::vector<PathModel> suite;
  suite.reserve(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    std::vector<SegmentSpec> specs;
    double total = 0.0;
    auto add = [&](const SegmentSpec& spec) {
      specs.push_back(spec);
      total += spec.length;
    };
    auto arc = [&](double sign) {
      const double radius = uniform(opt.min_radius, opt.max_radius);
      const double angle = uniform(opt.min_arc_angle, opt.max_arc_angle);
      return SegmentSpec::Arc(radius * angle, sign * radius);
    };
    const double target = uniform(opt.min_total, opt.max_total - opt.max_line);
    const double first_sign = coin() ? 1.0 : -1.0;
    // Every path opens with line, arc, opposite arc so that each carries a
    // sign-flip transition.
    add(SegmentSpec::Line(uniform(opt.min_line, opt.max_line)));
    add(arc(first_sign));
    add(arc(-first_sign));
    // A draw that would leave no room for the closing line is redrawn; with
    // target <= max_total - max_line a fitting draw always exists.
    int attempts = 0;
    while (total < target && attempts < 1000) {
      ++attempts;
      const SegmentSpec& last = specs.back();
      SegmentSpec next;
      if (last.kind == SegmentKind::kLine || coin()) {
        const double sign =
            last.kind == SegmentKind::kArc && coin()
                ? (last.curvature > 0.0 ? -1.0 : 1.0)
                : (coin() ? 1.0 : -1.0);
        next = arc(sign);
      } else {
        next = SegmentSpec::Line(uniform(opt.min_line, opt.max_line));
      }
      if (total + next.length + opt.min_line > opt.max_total) continue;
      add(next);
    }
    if (specs.back().kind == SegmentKind::kArc) {
      add(SegmentSpec::Line(
          uniform(opt.min_line, std::min(opt.max_line, opt.max_total - total))));
    }
    suite.emplace_back(Pose2{0.0, 0.0, 0.0}, specs, role);
  }
  return suite;
}

std::vector<CanonicalOffset> canonical_offsets() {
  return {
      {"FL", {2.0, 0.5}, true},
      {"FR", {2.0, -0.5}, true},
      {"RL", {-2.0, 0.5}, false},
      {"RR", {-2.0, -0.5}, false},
  };
}

PredictiveGains canonical_predictive_gains(bool front) {
  return front ? PredictiveGains::WithHorizon(0.15, 0.4, 0.5)
               : PredictiveGains::WithHorizon(0.2, 0.8, 2.0);
}

const CanonicalOffset* find_canonical(const ImplementOffset& offset) {
  static const std::vector<CanonicalOffset> slots = canonical_offsets();
  for (const CanonicalOffset& slot : slots) {
    if (std::abs(slot.offset.longitudinal - offset.longitudinal) <= 1e-9 &&
        std::abs(slot.offset.lateral - offset.lateral) <= 1e-9) {
      return &slot;
    }
  }
  return nullptr;
}

namespace {

// Runs the suite (plus mirrors) and returns the pooled |e_true| samples.
std::vector<double> PoolErrors(const SweepBase& base,
                               const std::vector<PathModel>& suite,
                               const ImplementOffset& offset, double speed,
                               CellStats& counts) {
  std::vector<double> pooled;
  auto run_one = [&](PathModel path) {
    Scenario sc;
    sc.path = std::make_shared<const PathModel>(std::move(path));
    sc.plant = base.plant;
    sc.controller = base.controller;
    sc.offset = offset;
    sc.vehicle = base.vehicle;
    sc.vehicle.speed = speed;
    sc.sim = base.sim;
    sc.seed = base.seed;
    ++counts.runs;
    const RunLog log = simulate(sc);
    if (log.aborted || log.records.empty()) {
      ++counts.failed_runs;
      return;
    }
    for (const LogRecord& r : log.records) pooled.push_back(std::abs(r.e_true));
  };
  for (const PathModel& path : suite) {
    run_one(path);
    if (base.mirror_balanced) run_one(path.Mirrored());
  }
  return pooled;
}

void FillStats(const std::vector<double>& pooled, CellStats& stats) {
  if (pooled.empty()) {
    stats.median = stats.iqr = stats.rmse = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  const MetricReport r = summarize(pooled);
  stats.median = r.median;
  stats.iqr = r.iqr;
  stats.rmse = r.rmse;
}

}  // namespace

CellStats evaluate_cell(const SweepBase& base, const std::vector<PathModel>& suite,
                        const ImplementOffset& offset, double speed) {
  CellStats stats;
  FillStats(PoolErrors(base, suite, offset, speed, stats), stats);
  return stats;
}

std::vector<double> default_speeds() {
  std::vector<double> out;
  for (int i = 1; i <= 8; ++i) out.push_back(0.25 * i);
  return out;
}

std::vector<SpeedRow> sweep_speed(const SweepBase& base,
                                  const std::vector<PathModel>& suite,
                                  const std::vector<double>& speeds) {
  const std::vector<CanonicalOffset> slots = canonical_offsets();
  // One job per (speed, slot); groups pool their two mirror-image slots.
  std::vector<std::vector<double>> pooled(speeds.size() * slots.size());
  std::vector<CellStats> counts(pooled.size());
  parallel_for(pooled.size(), [&](std::size_t job) {
    const double v = speeds[job / slots.size()];
    const CanonicalOffset& slot = slots[job % slots.size()];
    SweepBase b = base;
    if (b.canonical_gains && b.controller.kind == ControllerKind::kPredictive) {
      b.controller.predictive = canonical_predictive_gains(slot.front);
    }
    if (b.horizon && b.controller.kind == ControllerKind::kPredictive) {
      const PredictiveGains& g = b.controller.predictive;
      b.controller.predictive = PredictiveGains::WithHorizon(
          g.lambda, g.k_psi, b.horizon(v, slot.front), g.delta_s());
    }
    pooled[job] = PoolErrors(b, suite, slot.offset, v, counts[job]);
  });

  std::vector<SpeedRow> rows;
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    for (const bool front : {true, false}) {
      SpeedRow row;
      row.speed = speeds[i];
      row.group = front ? "front" : "rear";
      std::vector<double> group;
      for (std::size_t k = 0; k < slots.size(); ++k) {
        if (slots[k].front != front) continue;
        const std::size_t job = i * slots.size() + k;
        group.insert(group.end(), pooled[job].begin(), pooled[job].end());
        row.stats.runs += counts[job].runs;
        row.stats.failed_runs += counts[job].failed_runs;
      }
      FillStats(group, row.stats);
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<OffsetCell> sweep_offset(const SweepBase& base,
                                     const std::vector<PathModel>& suite,
                                     double speed, double extent, double step) {
  if (!(step > 0.0) || !(extent >= 0.0)) {
    throw InvalidArgument("offset grid needs step > 0 and extent >= 0");
  }
  const int half = static_cast<int>(std::lround(extent / step));
  const int side = 2 * half + 1;
  std::vector<OffsetCell> cells(static_cast<std::size_t>(side * side));
  for (int i = 0; i < side; ++i) {
    for (int j = 0; j < side; ++j) {
      OffsetCell& cell = cells[static_cast<std::size_t>(i * side + j)];
      cell.longitudinal = (i - half) * step;
      cell.lateral = (j - half) * step;
    }
  }
  parallel_for(cells.size(), [&](std::size_t k) {
    OffsetCell& cell = cells[k];
    cell.stats = evaluate_cell(base, suite, {cell.longitudinal, cell.lateral}, speed);
  });
  return cells;
}

void write_speed_csv(const std::vector<SpeedRow>& rows, std::ostream& out) {
  out << "speed_mps,group,median_m,iqr_m,rmse_m,runs,failed_runs\n"
      << std::setprecision(10);
  for (const SpeedRow& r : rows) {
    out << r.speed << ',' << r.group << ',' << r.stats.median << ',' << r.stats.iqr
        << ',' << r.stats.rmse << ',' << r.stats.runs << ',' << r.stats.failed_runs
        << '\n';
  }
}

void write_offset_csv(const std::vector<OffsetCell>& cells, std::ostream& out) {
  out << "I_s_m,I_y_m,median_m,iqr_m,rmse_m,runs,failed_runs\n"
      << std::setprecision(10);
  for (const OffsetCell& c : cells) {
    out << c.longitudinal << ',' << c.lateral << ',' << c.stats.median << ','
        << c.stats.iqr << ',' << c.stats.rmse << ',' << c.stats.runs << ','
        << c.stats.failed_runs << '\n';
  }
}

}  // namespace offset_track

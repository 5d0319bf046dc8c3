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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. `--only 3,4` runs a subset; `--coarse` uses a 0.5 m offset
// grid for the colormap.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "offset_track/benchmark.hpp"
#include "offset_track/cli_runner.hpp"
#include "offset_track/controllers.hpp"
#include "offset_track/errors.hpp"
#include "offset_track/horizon_tuner.hpp"
#include "offset_track/path_geometry.hpp"
#include "offset_track/plant_sim.hpp"
#include "offset_track/sideslip_observer.hpp"
#include "oracles.hpp"

using namespace offset_track;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

// Accumulates sub-checks; the detail keeps every measured value.
struct Checks {
  Outcome out;
  void Expect(bool ok, const std::string& what) {
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += (ok ? "" : "FAILED ") + what;
    out.pass = out.pass && ok;
  }
};

std::string Fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}
std::string Fmt(const char* f, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}
std::string Fmt(const char* f, double a, double b, double c) {
  char buf[192];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

ImplementOffset Slot(const std::string& name) {
  for (const CanonicalOffset& c : canonical_offsets()) {
    if (c.name == name) return c.offset;
  }
  return {};
}

// Least-squares slope of y against x.
double Slope(const std::vector<double>& x, const std::vector<double>& y) {
  double xm = 0, ym = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    xm += x[i];
    ym += y[i];
  }
  xm /= x.size();
  ym /= y.size();
  double num = 0, den = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    num += (x[i] - xm) * (y[i] - ym);
    den += (x[i] - xm) * (x[i] - xm);
  }
  return num / den;
}

// ---------------------------------------------------------------------------

Outcome ClosedFormOptimality() {
  std::mt19937_64 rng(101);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double e_I = U(-1.0, 1.0);
    const double e_pp = U(-0.2, 0.2);
    AuxTerms aux;
    aux.A = U(-0.1, 0.1);
    const PredictiveGains g = PredictiveGains::WithHorizon(U(0.05, 0.5), 0.6, U(0.5, 3.0));
    const double xi = predictive_psi_d(e_I, aux, e_pp, g, {0.0, 0.0}).xi;
    const double ref = oracle::golden_section(
        [&](double x) {
          return oracle::predictive_cost(x, e_I, aux.A, e_pp, g.lambda, g.delta_s(), g.n_h);
        },
        -3.0, 3.0, 1e-12);
    worst = std::max(worst, std::abs(xi - ref));
  }
  Checks c;
  c.Expect(worst <= 1e-7, Fmt("max |xi - argmin J| = %.2e (limit 1e-7)", worst));
  return c.out;
}

Outcome BacksteppingLimit() {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  PredictiveGains pg;
  pg.lambda = 0.15;
  pg.s_h = 1e-3;
  pg.n_h = 1;
  const BackstepGains bg{pg.lambda, 0.6};
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    AuxTerms aux;
    aux.alpha = 1.0 + 0.2 * u(rng);
    aux.gamma = 0.1 * u(rng);
    aux.A = 0.05 * u(rng);
    const ImplementOffset off{2.0 * u(rng), 2.0 * u(rng)};
    const double e_I = u(rng);
    const double e_pp = 0.1 * u(rng);
    worst = std::max(worst, std::abs(predictive_psi_d(e_I, aux, e_pp, pg, off).psi_d -
                                     backstepping_psi_d(e_I, aux, bg, off)));
  }
  Checks c;
  c.Expect(worst <= 1e-4, Fmt("max |psi_d(n_h=1) - psi_d(backstepping)| = %.3e rad (limit 1e-4)",
                              worst));
  return c.out;
}

// Random 2 m open-loop trajectories at constant steering on a line or an arc.
// Central differences of e_I(s) against e_I' plus psi' * de/dpsi.
double DerivativeGap(bool with_slip) {
  std::mt19937_64 rng(7);
  auto U = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double c =
        (trial % 4 == 0) ? 0.0 : U(0.02, 0.15) * (U(0.0, 1.0) < 0.5 ? -1.0 : 1.0);
    const std::vector<SegmentSpec> specs{
        c == 0.0 ? SegmentSpec::Line(60.0)
                 : SegmentSpec::Arc(std::min(60.0, 3.0 / std::abs(c)), 1.0 / c)};
    const PathModel path(Pose2{}, specs);
    ImplementOffset off{U(-3.0, 3.0), U(-1.0, 1.0)};
    if (c != 0.0 && off.Norm() * std::abs(c) >= 0.9) {
      off = {0.3 * off.longitudinal, 0.3 * off.lateral};
    }
    const double y = U(-0.5, 0.5), psi = U(-0.3, 0.3), delta = U(-0.3, 0.3);
    const double br = with_slip ? U(-0.05, 0.05) : 0.0;
    const double bf = with_slip ? U(-0.05, 0.05) : 0.0;
    VehicleParams vp;
    vp.tau_steer = 0.0;
    const PlantKind kind =
        with_slip ? PlantKind(PrescribedSlip{constant_slip(br, bf)}) : PlantKind(IdealKinematic{});
    const Pose2 foot = path.PoseAt(5.0);
    const Point2 p = frenet_to_world(path, 5.0, y);
    PlantState st;
    st.pose = {p.x, p.y, foot.heading + psi};
    st.delta_actual = delta;
    const double dt = 1e-3;
    const int n = 2000;  // 2 m at 1 m/s
    std::vector<FrenetState> fs;
    for (int k = 0; k <= n; ++k) {
      fs.push_back(match_to_path(path, st.pose).state);
      st = kinematic_step(st, delta, dt, vp, kind);
    }
    auto e_at = [&](int k) { return implement_error(fs[k], c, off).e_I; };
    const double yaw = kinematic_yaw_rate(delta, {br, bf}, vp);
    for (int k = 100; k < n; k += 190) {
      const FrenetState& f = fs[k];
      const double wbar = angular_deviation_rate(yaw, f, c, vp.speed);
      const double formula =
          spatial_error_derivative(f, {br, bf, 0.0}, wbar, vp.speed, c, off).e_I_prime;
      const int h = 5;
      const double ds = fs[k + h].s - fs[k - h].s;
      const double fd = (e_at(k + h) - e_at(k - h)) / ds;
      const double psi_prime = (fs[k + h].psi_tilde - fs[k - h].psi_tilde) / ds;
      const ImplementError ie = implement_error(f, c, off);
      const double d_rI = -off.longitudinal * std::sin(f.psi_tilde) +
                          off.lateral * std::cos(f.psi_tilde);
      const double de_dpsi = -std::tan(ie.epsilon) * d_rI;
      const double denom = std::max(std::abs(formula), 1e-2);
      worst = std::max(worst, std::abs(fd - psi_prime * de_dpsi - formula) / denom);
    }
  }
  return worst;
}

Outcome SpatialDerivativeCheck() {
  const double ideal = DerivativeGap(false);
  const double slip = DerivativeGap(true);
  Checks c;
  c.Expect(ideal <= 1e-4, Fmt("ideal plant worst relative gap %.2e (limit 1e-4)", ideal));
  c.out.detail += Fmt("; slip plant gap %.2e (not asserted)", slip);
  return c.out;
}

RunLog StraightRun(const ImplementOffset& off) {
  Scenario sc;
  sc.path = std::make_shared<PathModel>(Pose2{}, std::vector<SegmentSpec>{SegmentSpec::Line(120.0)});
  sc.controller.kind = ControllerKind::kPredictive;
  sc.offset = off;
  sc.vehicle.tau_steer = 0.0;
  sc.sim.use_observer = false;
  sc.sim.control_period = 0.01;
  sc.initial_lateral_shift = 0.5;
  return simulate(sc);
}

Outcome ConvergenceRate() {
  const double lambda = PredictiveGains{}.lambda;
  const RunLog log = StraightRun({2.0, 0.5});
  Checks c;
  if (log.aborted) {
    c.Expect(false, "run aborted: " + log.abort_reason);
    return c.out;
  }
  const double s0 = log.records.front().s;
  std::vector<double> s, le;
  double late = 0.0;
  for (const LogRecord& r : log.records) {
    const double d = r.s - s0;
    if (d >= 4.0 / lambda) late = std::max(late, std::abs(r.e_I));
    if (std::abs(r.e_I) < 0.3 && std::abs(r.e_I) > 0.02) {
      s.push_back(d);
      le.push_back(std::log(std::abs(r.e_I)));
    }
  }
  const double constant = -1.0 / Slope(s, le);
  c.Expect(std::abs(constant - 1.0 / lambda) <= 0.15 / lambda,
           Fmt("fitted decay constant %.2f m vs 1/lambda = %.2f m", constant, 1.0 / lambda));
  c.Expect(late < 0.01, Fmt("max |e_I| beyond 4/lambda = %.4f m", late));
  return c.out;
}

Outcome RearNonMinimumPhase() {
  const RunLog log = StraightRun({-2.0, 0.5});
  Checks c;
  if (log.aborted) {
    c.Expect(false, "run aborted: " + log.abort_reason);
    return c.out;
  }
  const double e0 = std::abs(log.records.front().e_I);
  double peak = 0.0;
  for (const LogRecord& r : log.records) peak = std::max(peak, std::abs(r.e_I));
  const double final_e = std::abs(log.records.back().e_I);
  c.Expect(peak > e0, Fmt("peak |e_I| %.3f m vs initial %.3f m", peak, e0));
  c.Expect(final_e < 0.01, Fmt("final |e_I| %.2e m", final_e));
  return c.out;
}

Outcome SpeedSweep() {
  RunConfig cfg;
  cfg.sweep.tune_step = 0.05;
  const HorizonTable table = tune_horizon_table(cfg);
  SweepBase base = make_sweep_base(cfg);
  base.controller.kind = ControllerKind::kPredictive;
  base.horizon = [table](double speed, bool front) { return table.Lookup(speed, front); };
  const auto suite = generate_suite(cfg.sweep.suite_seed, cfg.sweep.suite_count);
  const std::vector<SpeedRow> rows = sweep_speed(base, suite, cfg.sweep.speeds);
  Checks c;
  c.Expect(rows.size() == 16, Fmt("%.0f rows", static_cast<double>(rows.size())));
  double worst = 0.0;
  std::size_t failed = 0;
  std::map<double, std::pair<double, double>> by_speed;
  std::string table_text;
  for (const SpeedRow& r : rows) {
    worst = std::max(worst, r.stats.median);
    failed += r.stats.failed_runs;
    (r.group == "front" ? by_speed[r.speed].first : by_speed[r.speed].second) = r.stats.median;
  }
  int inverted = 0;
  for (std::size_t i = 0; i < table.speeds.size(); ++i) {
    const auto& [front, rear] = by_speed[table.speeds[i]];
    if (rear < front) ++inverted;
    table_text += Fmt(" v=%.2f:", table.speeds[i]) +
                  Fmt("%.1f/%.1f", table.front[i], table.rear[i]) +
                  Fmt("->%.4f/%.4f", front, rear);
  }
  c.Expect(worst < 0.15, Fmt("max median %.4f m", worst));
  c.Expect(inverted == 0, Fmt("%.0f speeds with rear < front", inverted));
  c.Expect(failed == 0, Fmt("%.0f failed runs", static_cast<double>(failed)));
  c.out.detail += "; s_h front/rear -> median front/rear:" + table_text;
  return c.out;
}

Outcome OffsetColormap(bool coarse) {
  RunConfig cfg;
  SweepBase base = make_sweep_base(cfg);
  base.controller.kind = ControllerKind::kPredictive;
  base.controller.predictive = PredictiveGains::WithHorizon(0.15, 0.6, 1.0);
  const auto suite = generate_suite(cfg.sweep.suite_seed, cfg.sweep.suite_count);
  const double step = coarse ? 0.5 : 0.25;
  const std::vector<OffsetCell> cells = sweep_offset(base, suite, 1.0, 3.0, step);
  std::map<std::pair<long, long>, double> med;
  auto key = [step](double v) { return std::lround(v / step); };
  const OffsetCell* best = &cells.front();
  double origin = NAN;
  std::size_t failed = 0;
  for (const OffsetCell& cell : cells) {
    med[{key(cell.longitudinal), key(cell.lateral)}] = cell.stats.median;
    if (cell.stats.median < best->stats.median) best = &cell;
    if (key(cell.longitudinal) == 0 && key(cell.lateral) == 0) origin = cell.stats.median;
    failed += cell.stats.failed_runs;
  }
  double worst_sym = 0.0;
  for (const auto& [k, m] : med) {
    const double other = med.at({k.first, -k.second});
    worst_sym = std::max(worst_sym, std::abs(m - other) / std::max(m, other));
  }
  // Mean increment of the median per step outward along each |I_s| ray.
  double sum = 0.0;
  int steps = 0, rising = 0;
  const long n = key(3.0);
  for (long iy = -n; iy <= n; ++iy) {
    for (int dir : {-1, 1}) {
      for (long k = 1; k <= n; ++k) {
        const double d = med.at({dir * k, iy}) - med.at({dir * (k - 1), iy});
        sum += d;
        ++steps;
        if (d >= 0.0) ++rising;
      }
    }
  }
  Checks c;
  c.Expect(best->longitudinal == 0.0 && best->lateral == 0.0,
           Fmt("grid minimum %.5f m at (I_s, I_y) = (%.2f, ", best->stats.median,
               best->longitudinal) +
               Fmt("%.2f); origin %.5f m", best->lateral, origin));
  c.Expect(origin < 0.05, Fmt("origin median %.5f m", origin));
  c.Expect(worst_sym <= 0.05, Fmt("worst I_y mirror asymmetry %.2f%%", 100.0 * worst_sym));
  c.Expect(sum / steps >= 0.0, Fmt("mean outward increment %.2e m/step, ", sum / steps) +
                                   Fmt("%.0f%% of steps non-decreasing",
                                       100.0 * rising / steps));
  c.Expect(failed == 0, Fmt("%.0f failed runs", static_cast<double>(failed)));
  return c.out;
}

Outcome TuningCurve() {
  RunConfig cfg;
  const SweepBase base = make_sweep_base(cfg);
  const auto training =
      generate_suite(cfg.tune.training_seed, cfg.tune.training_count, PathRole::kTraining);
  Checks c;
  double prev = -INFINITY;
  bool monotone = true;
  std::string stars;
  for (double v : {0.5, 1.0, 1.5}) {
    TuneSpec spec;
    spec.training_paths = training;
    spec.velocity = v;
    spec.offset = Slot("RR");
    spec.step = 0.01;
    const TuneResult r = tune(spec, base);
    const bool interior = r.s_h_star > spec.s_h_min + 1e-9 && r.s_h_star < spec.s_h_max - 1e-9;
    const double flat = flat_interval_length(r, 0.05);
    c.Expect(interior, Fmt("v=%.1f: s_h* = %.2f m (rmse %.4f m)", v, r.s_h_star, r.rmse_star));
    c.Expect(flat >= 0.5 - 1e-9, Fmt("v=%.1f: 5%% band %.2f m", v, flat));
    if (r.s_h_star < prev) monotone = false;
    prev = r.s_h_star;
    stars += Fmt(" %.2f", r.s_h_star);
  }
  c.Expect(monotone, "s_h*(0.5, 1.0, 1.5) =" + stars);
  return c.out;
}

MetricReport RunValidation(const ControllerConfig& cc, const ImplementOffset& off,
                           bool observer) {
  Scenario sc;
  sc.path = std::make_shared<PathModel>(build_validation_path());
  sc.plant = DynamicSingleTrack{};
  sc.controller = cc;
  sc.offset = off;
  sc.sim.use_observer = observer;
  const RunLog log = run(sc);
  if (log.aborted) throw Error("run aborted: " + log.abort_reason);
  return metrics(log, *sc.path);
}

Outcome ControllerComparison() {
  const ImplementOffset rr = Slot("RR");
  ControllerConfig pred;
  pred.kind = ControllerKind::kPredictive;
  pred.predictive = canonical_predictive_gains(false);
  ControllerConfig back;
  back.kind = ControllerKind::kBackstepping;
  back.backstepping = {0.15, 0.6};
  const MetricReport p = RunValidation(pred, rr, true);
  const MetricReport b = RunValidation(back, rr, true);
  Checks c;
  c.Expect(p.median <= 0.9 * b.median,
           Fmt("median predictive %.4f m vs backstepping %.4f m", p.median, b.median));
  bool flips_ok = true;
  int flips = 0;
  std::string detail;
  for (std::size_t i = 0; i < p.transitions.size(); ++i) {
    if (p.transitions[i].transition.kind != TransitionKind::kArcToArcSignFlip) continue;
    ++flips;
    flips_ok = flips_ok && p.transitions[i].max_error <= b.transitions[i].max_error;
    detail += Fmt(" %.3f vs %.3f", p.transitions[i].max_error, b.transitions[i].max_error);
  }
  c.Expect(flips > 0 && flips_ok, "sign-flip transition max predictive vs backstepping:" + detail);
  return c.out;
}

Outcome ObserverAblation() {
  const PathModel path = build_validation_path();
  const ImplementOffset rr = Slot("RR");
  auto arc_median = [&](bool observer) {
    Scenario sc;
    sc.path = std::make_shared<PathModel>(path);
    sc.plant = DynamicSingleTrack{};
    sc.controller.kind = ControllerKind::kPredictive;
    sc.controller.predictive = canonical_predictive_gains(false);
    sc.offset = rr;
    sc.sim.use_observer = observer;
    const RunLog log = run(sc);
    if (log.aborted) throw Error("run aborted: " + log.abort_reason);
    std::vector<double> errs;
    for (const LogRecord& r : log.records) {
      const double s = std::clamp(r.s, 0.0, path.total_length());
      if (path.segments()[path.SegmentIndexAt(s)].kind == SegmentKind::kArc) {
        errs.push_back(std::abs(r.e_true));
      }
    }
    return percentile(errs, 0.5);
  };
  const double with = arc_median(true);
  const double without = arc_median(false);

  // Constant slips on the prescribed-slip plant, straight drive along x.
  const double br = 2.0 * std::numbers::pi / 180.0;
  const double bf = 1.0 * std::numbers::pi / 180.0;
  VehicleParams p;
  const PlantKind kind = PrescribedSlip{constant_slip(br, bf)};
  PlantState st;
  ObserverState obs;
  double settle = 0.0;
  for (int i = 0; i < 600; ++i) {
    st = plant_step(st, 0.0, 0.01, p, kind);
    obs = observer_step(obs, {st.pose.x, st.pose.y, st.pose.heading}, st.delta_actual, p.speed,
                        0.0, 0.01, p.wheelbase);
    if (std::abs(obs.beta_r_hat - br) > 0.05 * br || std::abs(obs.beta_f_hat - bf) > 0.05 * bf) {
      settle = st.t;
    }
  }
  Checks c;
  c.Expect(with <= without,
           Fmt("arc median with observer %.4f m, without %.4f m", with, without));
  c.Expect(settle <= 2.0, Fmt("slip estimates within 5%% after %.2f s", settle));
  return c.out;
}

Outcome Robustness() {
  Checks c;
  const PathModel path(Pose2{}, std::vector<SegmentSpec>{SegmentSpec::Line(10.0),
                                                         SegmentSpec::Arc(20.0, 8.0),
                                                         SegmentSpec::Arc(20.0, -12.0)});
  const PathModel mirror = path.Mirrored();
  VehicleParams vp;
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int non_finite = 0;
  double sym = 0.0;
  for (int i = 0; i < 5000; ++i) {
    ControlMeasurement m;
    // Wide states, including ones near the singular sets.
    m.frenet = {25.0 + 24.0 * u(rng), 12.0 * u(rng), 1.6 * u(rng)};
    m.yaw_rate = 0.5 * u(rng);
    m.slip = {0.3 * u(rng), 0.3 * u(rng), 0.0};
    const ImplementOffset off{3.0 * u(rng), 3.0 * u(rng)};
    ControlMeasurement mm = m;
    mm.frenet.y = -m.frenet.y;
    mm.frenet.psi_tilde = -m.frenet.psi_tilde;
    mm.yaw_rate = -m.yaw_rate;
    mm.slip = {-m.slip.beta_r, -m.slip.beta_f, 0.0};
    const ImplementOffset moff{off.longitudinal, -off.lateral};
    const double prev = 0.1 * u(rng);
    const std::vector<std::pair<ControlCommand, ControlCommand>> pairs = {
        {predictive_control(m, path, {}, off, vp, prev),
         predictive_control(mm, mirror, {}, moff, vp, -prev)},
        {backstepping_control(m, path, {}, off, vp, prev),
         backstepping_control(mm, mirror, {}, moff, vp, -prev)},
        {lateral_servoing_control(m, path, {}, off, vp, prev),
         lateral_servoing_control(mm, mirror, {}, moff, vp, -prev)},
    };
    for (const auto& [a, b] : pairs) {
      if (!std::isfinite(a.delta) || !std::isfinite(b.delta)) ++non_finite;
      sym = std::max(sym, std::abs(a.delta + b.delta));
    }
  }
  c.Expect(non_finite == 0, Fmt("%.0f non-finite commands over 30000", non_finite));
  c.Expect(sym <= 1e-12, Fmt("mirror residual %.1e", sym));

  auto kind_of = [](auto&& f) -> int {
    try {
      f();
    } catch (const SingularityError& e) {
      return static_cast<int>(e.kind());
    } catch (...) {
      return -2;
    }
    return -1;
  };
  const int center = kind_of([] {
    spatial_error_derivative({0, 10.0, 0.0}, {}, 0.0, 1.0, 0.1, {1.0, 0.0});
  });
  AuxTerms aux;
  aux.gamma = 2.0;
  const int lever = kind_of([&] { backstepping_psi_d(0.1, aux, {}, {1.0, 0.5}); });
  const int heading = kind_of([] {
    steering_law(0.0, {0, 0, 2.0}, {}, 0.0, 0.6, 1.0, 2.0);
  });
  c.Expect(center == static_cast<int>(SingularityError::Kind::kOsculatingCenter) &&
               lever == static_cast<int>(SingularityError::Kind::kLeverArm) &&
               heading == static_cast<int>(SingularityError::Kind::kHeading),
           "typed singularity errors raised");

  bool identical = true;
  for (ControllerKind k : {ControllerKind::kPredictive, ControllerKind::kBackstepping,
                           ControllerKind::kLateralServoing}) {
    Scenario sc;
    sc.path = std::make_shared<PathModel>(build_validation_path());
    sc.plant = DynamicSingleTrack{};
    sc.controller.kind = k;
    sc.offset = Slot("RR");
    std::ostringstream a, b;
    write_log_csv(run(sc), a);
    write_log_csv(run(sc), b);
    identical = identical && a.str() == b.str();
  }
  c.Expect(identical, "repeated runs bit-identical");
  return c.out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> only;
  bool coarse = false;
  app.add_option("--only", only, "Criterion numbers to run")->delimiter(',');
  app.add_flag("--coarse", coarse, "0.5 m offset grid");
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form optimality", ClosedFormOptimality},
      {"backstepping-limit equivalence", BacksteppingLimit},
      {"spatial derivative", SpatialDerivativeCheck},
      {"convergence rate", ConvergenceRate},
      {"rear non-minimum phase", RearNonMinimumPhase},
      {"speed sweep", SpeedSweep},
      {"offset colormap", [coarse] { return OffsetColormap(coarse); }},
      {"horizon tuning curve", TuningCurve},
      {"controller comparison", ControllerComparison},
      {"observer ablation", ObserverAblation},
      {"robustness", Robustness},
  };
  const std::set<int> selected(only.begin(), only.end());
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int number = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(number)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s criterion %d: %s (%s) [%.1f s]\n", o.pass ? "PASS" : "FAIL", number,
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
    if (!o.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "offset_track/benchmark.hpp"
#include "offset_track/errors.hpp"

namespace offset_track {
namespace {

std::set<TransitionKind> KindsOf(const PathModel& path) {
  std::set<TransitionKind> kinds;
  for (const Transition& t : transitions(path)) kinds.insert(t.kind);
  return kinds;
}

TEST(GenerateSuite, Deterministic) {
  const auto a = generate_suite(2024, 5);
  const auto b = generate_suite(2024, 5);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto sa = a[i].Specs();
    const auto sb = b[i].Specs();
    ASSERT_EQ(sa.size(), sb.size());
    for (std::size_t k = 0; k < sa.size(); ++k) {
      EXPECT_EQ(sa[k].length, sb[k].length);
      EXPECT_EQ(sa[k].curvature, sb[k].curvature);
    }
  }
  EXPECT_NE(generate_suite(2025, 1)[0].total_length(), a[0].total_length());
}

TEST(GenerateSuite, RespectsGeneratorLimits) {
  const auto suite = generate_suite(2024, kDefaultSuiteSize);
  std::set<TransitionKind> kinds;
  for (const PathModel& p : suite) {
    EXPECT_LE(p.MaxAbsCurvature(), 0.2 + 1e-12);
    EXPECT_GE(p.total_length(), 100.0);
    EXPECT_LE(p.total_length(), 300.0);
    EXPECT_EQ(p.role(), PathRole::kEvaluation);
    for (const SegmentSpec& s : p.Specs()) {
      if (s.kind == SegmentKind::kLine) {
        EXPECT_GE(s.length, 10.0 - 1e-9);
        EXPECT_LE(s.length, 50.0 + 1e-9);
      } else {
        const double r = 1.0 / std::abs(s.curvature);
        EXPECT_GE(r, 5.0 - 1e-9);
        EXPECT_LE(r, 30.0 + 1e-9);
        const double angle = s.length / r;
        EXPECT_GE(angle, 30.0 * std::numbers::pi / 180.0 - 1e-9);
        EXPECT_LE(angle, std::numbers::pi + 1e-9);
      }
    }
    const auto k = KindsOf(p);
    kinds.insert(k.begin(), k.end());
  }
  EXPECT_EQ(kinds.size(), 4u);
}

TEST(GenerateSuite, EveryPathHasASignFlip) {
  for (const PathModel& p : generate_suite(2024, kDefaultSuiteSize)) {
    EXPECT_TRUE(KindsOf(p).count(TransitionKind::kArcToArcSignFlip));
  }
}

TEST(GenerateSuite, TrainingRoleIsTagged) {
  for (const PathModel& p : generate_suite(1001, 3, PathRole::kTraining)) {
    EXPECT_EQ(p.role(), PathRole::kTraining);
  }
}

TEST(ValidationPath, Structure) {
  const PathModel p = build_validation_path();
  const auto specs = p.Specs();
  ASSERT_EQ(specs.size(), 6u);
  int lines = 0, arcs = 0;
  for (const SegmentSpec& s : specs) (s.kind == SegmentKind::kLine ? lines : arcs)++;
  EXPECT_EQ(lines, 3);
  EXPECT_EQ(arcs, 3);
  EXPECT_EQ(specs.front().kind, SegmentKind::kLine);
  const auto k = KindsOf(p);
  EXPECT_TRUE(k.count(TransitionKind::kLineToArc));
  EXPECT_TRUE(k.count(TransitionKind::kArcToLine));
  EXPECT_TRUE(k.count(TransitionKind::kArcToArcSameSign) ||
              k.count(TransitionKind::kArcToArcSignFlip));
  EXPECT_GE(p.total_length(), 150.0);
  EXPECT_LE(p.total_length(), 400.0);
}

TEST(AvoidancePath, Structure) {
  const PathModel p = build_avoidance_path();
  const auto specs = p.Specs();
  // L1, C1 (U-turn), then L2-1 .. L2-3 joined by two jogs, then C2 (U-turn).
  EXPECT_EQ(specs.front().kind, SegmentKind::kLine);
  EXPECT_EQ(specs[1].kind, SegmentKind::kArc);
  EXPECT_NEAR(std::abs(specs[1].length * specs[1].curvature), std::numbers::pi, 1e-9);
  EXPECT_EQ(specs.back().kind, SegmentKind::kArc);
  EXPECT_NEAR(std::abs(specs.back().length * specs.back().curvature), std::numbers::pi, 1e-9);
  // Heading after the jogs equals the heading before them.
  EXPECT_NEAR(WrapAngle(p.PoseAt(p.segment_start(specs.size() - 1)).heading -
                        p.PoseAt(p.segment_start(2)).heading),
              0.0, 1e-9);
  EXPECT_GE(p.total_length(), 150.0);
  EXPECT_LE(p.total_length(), 400.0);
}

Scenario StraightScenario() {
  Scenario sc;
  sc.path = std::make_shared<PathModel>(Pose2{}, std::vector<SegmentSpec>{SegmentSpec::Line(60.0)});
  sc.offset = {2.0, 0.5};
  return sc;
}

TEST(Run, EquilibriumHoldsOnStraight) {
  const RunLog log = run(StraightScenario());
  ASSERT_FALSE(log.aborted);
  for (const LogRecord& r : log.records) EXPECT_LT(std::abs(r.e_true), 1e-3);
}

TEST(Run, LogsAreBitIdentical) {
  Scenario sc;
  sc.path = std::make_shared<PathModel>(build_validation_path());
  sc.plant = DynamicSingleTrack{};
  sc.offset = {-2.0, -0.5};
  const RunLog a = run(sc);
  const RunLog b = run(sc);
  std::ostringstream sa, sb;
  write_log_csv(a, sa);
  write_log_csv(b, sb);
  EXPECT_EQ(sa.str(), sb.str());
}

TEST(Run, UniformSamplingAndHeader) {
  const RunLog log = run(StraightScenario());
  ASSERT_GT(log.records.size(), 2u);
  for (std::size_t i = 1; i < log.records.size(); ++i) {
    EXPECT_NEAR(log.records[i].t - log.records[i - 1].t, log.sample_period, 1e-9);
  }
  std::ostringstream out;
  write_log_csv(log, out);
  EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
            "t_s,s_m,x_m,y_m,heading_rad,delta_cmd_rad,delta_act_rad,y_err_m,psi_err_rad,"
            "e_I_m,e_true_m,beta_r_true_rad,beta_f_true_rad,beta_r_hat_rad,beta_f_hat_rad,"
            "curvature_1pm");
}

TEST(Run, RefusesTrainingPaths) {
  Scenario sc = StraightScenario();
  sc.path = std::make_shared<PathModel>(sc.path->WithRole(PathRole::kTraining));
  EXPECT_THROW(run(sc), InvalidArgument);
  EXPECT_NO_THROW(simulate(sc));
}

TEST(Run, ErrorsPeakNearTransitions) {
  Scenario sc;
  sc.path = std::make_shared<PathModel>(build_validation_path());
  sc.plant = DynamicSingleTrack{};
  for (const CanonicalOffset& c : canonical_offsets()) {
    if (c.name == "RR") sc.offset = c.offset;
  }
  const RunLog log = run(sc);
  ASSERT_FALSE(log.aborted);
  const std::vector<double> joints = sc.path->Joints();
  std::vector<double> peak(sc.path->segments().size(), -1.0);
  std::vector<double> peak_s(peak.size(), 0.0);
  for (const LogRecord& r : log.records) {
    const std::size_t i = sc.path->SegmentIndexAt(std::clamp(r.s, 0.0, sc.path->total_length()));
    if (std::abs(r.e_true) > peak[i]) {
      peak[i] = std::abs(r.e_true);
      peak_s[i] = r.s;
    }
  }
  for (std::size_t i = 0; i < peak.size(); ++i) {
    if (peak[i] < 0.0) continue;
    double nearest = INFINITY;
    for (double j : joints) nearest = std::min(nearest, std::abs(peak_s[i] - j));
    EXPECT_LE(nearest, kTransitionWindow) << "segment " << i << " peak at s = " << peak_s[i];
  }
}

TEST(Metrics, ConstantAndAlternatingSignals) {
  MetricReport m = summarize(std::vector<double>(11, 0.1));
  EXPECT_DOUBLE_EQ(m.median, 0.1);
  EXPECT_DOUBLE_EQ(m.iqr, 0.0);
  std::vector<double> alt;
  for (int i = 0; i < 10; ++i) alt.push_back(i % 2 ? 0.1 : -0.1);
  m = summarize(alt);
  EXPECT_DOUBLE_EQ(m.median, 0.1);
  EXPECT_DOUBLE_EQ(m.iqr, 0.0);
  EXPECT_DOUBLE_EQ(m.rmse, 0.1);
}

TEST(Metrics, SpikeAtAJointOnlyMovesThatTransition) {
  const PathModel path = build_validation_path();
  const std::vector<Transition> tr = transitions(path);
  ASSERT_GE(tr.size(), 2u);
  RunLog log;
  log.sample_period = 0.05;
  std::size_t spike_index = 0;
  double best = INFINITY;
  for (int i = 0; i * 0.05 <= path.total_length(); ++i) {
    LogRecord r;
    r.t = i * 0.05;
    r.s = i * 0.05;
    r.e_true = 0.01;
    if (std::abs(r.s - tr[1].s) < best) {
      best = std::abs(r.s - tr[1].s);
      spike_index = log.records.size();
    }
    log.records.push_back(r);
  }
  log.records[spike_index].e_true = -0.5;
  const MetricReport m = metrics(log, path);
  ASSERT_EQ(m.transitions.size(), tr.size());
  for (const TransitionMax& t : m.transitions) {
    if (t.transition.id == tr[1].id) {
      EXPECT_DOUBLE_EQ(t.max_error, 0.5);
    } else if (std::abs(t.transition.s - tr[1].s) > 2.0 * kTransitionWindow) {
      EXPECT_DOUBLE_EQ(t.max_error, 0.01);
    }
    EXPECT_GE(t.max_error, m.median);
  }
  EXPECT_LE(m.median, m.p75);
}

TEST(Percentile, MatchesSortedOrderStatistics) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int n : {1, 2, 5, 100, 101}) {
    std::vector<double> v(n);
    for (double& x : v) x = g(rng);
    std::vector<double> sorted = v;
    std::sort(sorted.begin(), sorted.end());
    for (double p : {0.0, 0.25, 0.5, 0.75, 1.0, 0.33}) {
      const double pos = p * (n - 1);
      const auto lo = static_cast<std::size_t>(std::floor(pos));
      const std::size_t hi = std::min<std::size_t>(lo + 1, n - 1);
      const double expected = sorted[lo] + (pos - lo) * (sorted[hi] - sorted[lo]);
      EXPECT_NEAR(percentile(v, p), expected, 1e-15) << "n " << n << " p " << p;
    }
  }
  EXPECT_THROW(percentile({}, 0.5), InvalidArgument);
}

TEST(Sweeps, OffsetGridShapeAndDeterminism) {
  SweepBase base;
  base.plant = IdealKinematic{};
  const auto suite = generate_suite(2024, 1);
  const auto a = sweep_offset(base, suite, 1.0, 0.5, 0.5);
  const auto b = sweep_offset(base, suite, 1.0, 0.5, 0.5);
  ASSERT_EQ(a.size(), 9u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].stats.median, b[i].stats.median);
    EXPECT_EQ(a[i].stats.runs, 2u);  // path and mirror
  }
}

TEST(Sweeps, SpeedRowsPerGroup) {
  SweepBase base;
  base.plant = IdealKinematic{};
  const auto rows = sweep_speed(base, generate_suite(2024, 1), {1.0, 2.0});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].group, "front");
  EXPECT_EQ(rows[1].group, "rear");
  EXPECT_EQ(default_speeds().size(), 8u);
}

}  // namespace
}  // namespace offset_track

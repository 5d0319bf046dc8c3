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

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "offset_track/controllers.hpp"
#include "offset_track/path_geometry.hpp"
#include "offset_track/plant_sim.hpp"
#include "offset_track/sideslip_observer.hpp"

namespace offset_track {

enum class ControllerKind { kLateralServoing, kBackstepping, kPredictive };

const char* controller_name(ControllerKind kind);
// Accepts "predictive", "backstepping", "lateral_servoing".
ControllerKind parse_controller(const std::string& name);

struct ControllerConfig {
  ControllerKind kind = ControllerKind::kPredictive;
  PredictiveGains predictive;
  BackstepGains backstepping;
  ServoGains servoing;
};

struct SimOptions {
  double dt = 0.01;              // physics step, s
  double control_period = 0.05;  // zero-order hold on the command, s
  bool use_observer = true;      // false: estimated slips forced to 0
  ObserverGains observer;
  double corridor = kDefaultMatchCorridor;
};

struct Scenario {
  std::shared_ptr<const PathModel> path;
  PlantKind plant = IdealKinematic{};
  ControllerConfig controller;
  ImplementOffset offset;
  VehicleParams vehicle;
  SimOptions sim;
  std::uint64_t seed = 0;
  // The robot starts aligned with the path, placed so the implement sits on
  // it; these perturb that pose (Frenet lateral shift and heading error).
  double initial_lateral_shift = 0.0;
  double initial_heading_error = 0.0;
  // Optional explicit start abscissa of the robot; negative = automatic.
  double initial_s = -1.0;
  // Optional stop abscissa of the robot; negative = automatic.
  double stop_s = -1.0;
};

// One record per control period.
struct LogRecord {
  double t = 0.0;
  double s = 0.0;
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;
  double delta_cmd = 0.0;
  double delta_actual = 0.0;
  double y_err = 0.0;
  double psi_err = 0.0;
  double e_I = 0.0;
  double e_true = 0.0;
  double beta_r_true = 0.0;
  double beta_f_true = 0.0;
  double beta_r_hat = 0.0;
  double beta_f_hat = 0.0;
  double curvature = 0.0;
};

struct RunEvent {
  std::size_t step = 0;
  std::string message;
};

struct RunLog {
  std::vector<LogRecord> records;
  std::vector<RunEvent> events;
  double sample_period = 0.0;
  bool aborted = false;  // corridor departure
  std::string abort_reason;
};

void validate_scenario(const Scenario& sc);

// Closed-loop simulation, deterministic. Accepts any path role.
RunLog simulate(const Scenario& sc);

// Benchmark entry point: like simulate() but refuses training-tagged paths.
RunLog run(const Scenario& sc);

void write_log_csv(const RunLog& log, std::ostream& out);
extern const char* const kLogCsvHeader;

enum class TransitionKind { kLineToArc, kArcToLine, kArcToArcSameSign, kArcToArcSignFlip };

const char* transition_name(TransitionKind kind);

struct Transition {
  std::size_t id = 0;  // index of the downstream segment
  double s = 0.0;
  TransitionKind kind = TransitionKind::kLineToArc;
};

std::vector<Transition> transitions(const PathModel& path);

struct TransitionMax {
  Transition transition;
  double max_error = 0.0;
  std::size_t samples = 0;
};

inline constexpr double kTransitionWindow = 10.0;

struct MetricReport {
  double median = 0.0;
  double iqr = 0.0;
  double rmse = 0.0;
  double p25 = 0.0;
  double p75 = 0.0;
  double max = 0.0;
  std::size_t samples = 0;
  std::vector<TransitionMax> transitions;
};

// Linear interpolation between order statistics, p in [0, 1]. Sorts a copy.
double percentile(std::vector<double> values, double p);

// Statistics of absolute values.
MetricReport summarize(const std::vector<double>& errors);

// Uses |e_true|; per-transition windows are +-kTransitionWindow in robot s.
MetricReport metrics(const RunLog& log, const PathModel& path);

// Absolute true implement errors of a log.
std::vector<double> abs_true_errors(const RunLog& log);

PathModel build_validation_path();
PathModel build_avoidance_path();

struct SuiteOptions {
  double min_radius = 5.0;
  double max_radius = 30.0;
  double min_arc_angle = 30.0 * 3.14159265358979323846 / 180.0;
  double max_arc_angle = 180.0 * 3.14159265358979323846 / 180.0;
  double min_line = 10.0;
  double max_line = 50.0;
  double min_total = 100.0;
  double max_total = 300.0;
};

inline constexpr int kDefaultSuiteSize = 17;

std::vector<PathModel> generate_suite(std::uint64_t seed, int n,
                                      PathRole role = PathRole::kEvaluation,
                                      const SuiteOptions& options = {});

// The four mounting positions of the speed study, front/rear x left/right.
struct CanonicalOffset {
  std::string name;  // FL, FR, RL, RR
  ImplementOffset offset;
  bool front = true;
};

std::vector<CanonicalOffset> canonical_offsets();

// Predictive gains tuned per mounting group.
PredictiveGains canonical_predictive_gains(bool front);

// Returns the canonical slot matching offset within 1e-9, or nullptr.
const CanonicalOffset* find_canonical(const ImplementOffset& offset);

// Scenario template shared by the sweeps; path, offset and speed are filled
// per run.
struct SweepBase {
  PlantKind plant = DynamicSingleTrack{};
  ControllerConfig controller;
  VehicleParams vehicle;
  SimOptions sim;
  std::uint64_t seed = 0;
  // Runs each path and its mirror image, so left/right statistics are pooled
  // over a mirror-balanced suite.
  bool mirror_balanced = true;
  // Use canonical_predictive_gains per mounting group in the speed sweep.
  bool canonical_gains = false;
  // When set, overrides the predictive horizon per (speed, front group).
  std::function<double(double speed, bool front)> horizon;
};

struct CellStats {
  double median = 0.0;
  double iqr = 0.0;
  double rmse = 0.0;
  std::size_t runs = 0;
  std::size_t failed_runs = 0;
};

// Pools |e_true| over the suite (plus mirrors) for one offset and speed.
CellStats evaluate_cell(const SweepBase& base, const std::vector<PathModel>& suite,
                        const ImplementOffset& offset, double speed);

struct SpeedRow {
  double speed = 0.0;
  std::string group;  // "front" or "rear"
  CellStats stats;
};

std::vector<double> default_speeds();

std::vector<SpeedRow> sweep_speed(const SweepBase& base,
                                  const std::vector<PathModel>& suite,
                                  const std::vector<double>& speeds);

struct OffsetCell {
  double longitudinal = 0.0;
  double lateral = 0.0;
  CellStats stats;
};

// Grid over [-extent, extent]^2 with the given step (I_s and I_y).
std::vector<OffsetCell> sweep_offset(const SweepBase& base,
                                     const std::vector<PathModel>& suite,
                                     double speed, double extent = 3.0,
                                     double step = 0.25);

void write_speed_csv(const std::vector<SpeedRow>& rows, std::ostream& out);
void write_offset_csv(const std::vector<OffsetCell>& cells, std::ostream& out);

}  // namespace offset_track

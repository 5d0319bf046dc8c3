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

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "offset_track/benchmark.hpp"
#include "offset_track/horizon_tuner.hpp"

namespace offset_track {

inline constexpr int kConfigSchemaVersion = 1;
inline constexpr std::uint64_t kDefaultSuiteSeed = 2024;
inline constexpr std::uint64_t kDefaultTrainingSeed = 1001;

enum class PlantChoice { kIdeal, kDynamic, kConstantSlip, kCurvatureSlip };

PlantChoice parse_plant(const std::string& name);
const char* plant_name(PlantChoice plant);

struct SlipSettings {
  double beta_r = 0.0;  // constant profile
  double beta_f = 0.0;
  double ramp_time = 0.0;
  double gain_r = 0.0;  // curvature profile, rad per 1/m
  double gain_f = 0.0;
};

struct TuneSettings {
  double s_h_min = 0.5;
  double s_h_max = 3.0;
  double step = 0.01;
  double delta_s = 0.1;
  std::uint64_t training_seed = kDefaultTrainingSeed;
  int training_count = kDefaultSuiteSize;
  std::vector<double> speeds;  // empty: the scenario speed
  bool mirror_balanced = false;
};

struct SweepSettings {
  std::uint64_t suite_seed = kDefaultSuiteSeed;
  int suite_count = kDefaultSuiteSize;
  std::vector<double> speeds = default_speeds();
  double extent = 3.0;
  double step = 0.25;
  bool mirror_balanced = true;
  // Speed sweep: tune s_h per (speed, mounting group) on the training suite.
  bool tune_horizon = true;
  double tune_step = 0.05;
};

struct CompareSettings {
  std::vector<ControllerKind> controllers{ControllerKind::kPredictive,
                                          ControllerKind::kBackstepping};
  bool observer_ablation = false;  // adds a row per controller with slips forced to 0
};

struct RunConfig {
  std::string command;  // set by the dispatcher
  int schema_version = kConfigSchemaVersion;
  std::string path_name = "validation";
  std::vector<PathModel> paths;  // resolved from path_name
  PlantChoice plant = PlantChoice::kDynamic;
  SlipSettings slip;
  ControllerConfig controller;
  ImplementOffset offset;
  VehicleParams vehicle;
  SimOptions sim;
  std::uint64_t seed = 0;
  double initial_lateral_shift = 0.0;
  double initial_heading_error = 0.0;
  TuneSettings tune;
  SweepSettings sweep;
  CompareSettings compare;
  std::string out_dir = "out";
  std::uint64_t config_hash = 0;
};

using ConfigOverride = std::pair<std::string, std::string>;  // dotted key, value

// Parses and validates a config document. Overrides replace or add dotted
// keys before validation. Relative path files resolve against base_dir.
RunConfig parse_config(const std::string& text,
                       const std::vector<ConfigOverride>& overrides = {},
                       const std::string& base_dir = ".");
RunConfig load_config(const std::string& filename,
                      const std::vector<ConfigOverride>& overrides = {});

// Builtin names: validation, avoidance, suite:<seed>, suite:<seed>:<index>.
std::vector<PathModel> resolve_paths(const std::string& name,
                                     const std::string& base_dir, int suite_count);

PlantKind make_plant(const RunConfig& cfg, const std::shared_ptr<const PathModel>& path);
Scenario make_scenario(const RunConfig& cfg, const PathModel& path);
SweepBase make_sweep_base(const RunConfig& cfg);

struct CompareRow {
  std::string label;
  ControllerKind controller = ControllerKind::kPredictive;
  bool observer = true;
  bool ok = false;
  std::string error;
  MetricReport report;
};

// Runs each controller on the first configured path with identical settings.
std::vector<CompareRow> compare(const RunConfig& cfg);

// Per-speed s_h* for the front (FL) and rear (RL) slots, tuned on the
// training suite, used by the speed sweep.
struct HorizonTable {
  std::vector<double> speeds;
  std::vector<double> front;
  std::vector<double> rear;
  double Lookup(double speed, bool front_group) const;
};

HorizonTable tune_horizon_table(const RunConfig& cfg);

// Writes text to filename through a temporary file and a rename.
void write_file_atomic(const std::string& filename, const std::string& content);

// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& data);

struct CommandOutcome {
  std::vector<std::string> outputs;
  std::vector<std::string> warnings;
  bool all_ok = true;
};

CommandOutcome run_simulate(const RunConfig& cfg);
CommandOutcome run_tune(const RunConfig& cfg);
CommandOutcome run_sweep_speed(const RunConfig& cfg);
CommandOutcome run_sweep_offset(const RunConfig& cfg);
CommandOutcome run_compare(const RunConfig& cfg);

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const CommandOutcome& outcome);

const char* library_version();

}  // namespace offset_track

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

#include "offset_track/cli_runner.hpp"

#include <unistd.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "offset_track/config_doc.hpp"
#include "offset_track/errors.hpp"
#include "offset_track/parallel.hpp"

#ifndef OFFSET_TRACK_VERSION
#define OFFSET_TRACK_VERSION "0.0.0"
#endif

namespace offset_track {
namespace {

namespace fs = std::filesystem;

using Schema = std::map<std::string, std::set<std::string>>;

const Schema& ConfigSchema() {
  static const Schema schema = {
      {"", {"schema_version"}},
      {"scenario",
       {"path", "controller", "plant", "speed", "seed", "lateral_shift",
        "heading_error"}},
      {"offset", {"longitudinal", "lateral"}},
      {"vehicle",
       {"wheelbase", "delta_max", "tau_steer", "cornering_stiffness", "mass",
        "yaw_inertia", "cg_front_fraction"}},
      {"slip", {"beta_r", "beta_f", "ramp_time", "gain_r", "gain_f"}},
      {"predictive", {"lambda", "k_psi", "s_h", "delta_s"}},
      {"backstepping", {"k_y", "k_psi"}},
      {"servoing", {"k_d", "k_p"}},
      {"observer", {"enabled", "g_y", "g_psi"}},
      {"sim", {"dt", "control_period", "corridor"}},
      {"tune",
       {"s_h_min", "s_h_max", "step", "delta_s", "training_seed", "training_count",
        "speeds", "mirror_balanced"}},
      {"sweep",
       {"suite_seed", "suite_count", "speeds", "extent", "step", "mirror_balanced",
        "tune_horizon", "tune_step"}},
      {"compare", {"controllers", "observer_ablation"}},
      {"output", {"dir"}},
  };
  return schema;
}

std::string Dotted(const std::string& section, const std::string& key) {
  return section.empty() ? key : section + "." + key;
}

void CheckSchema(const ConfigDocument& doc) {
  const Schema& schema = ConfigSchema();
  for (const auto& [name, list] : doc.arrays) {
    throw ConfigError(name, list.front().line, "unknown table");
  }
  auto check_table = [&](const std::string& section, const ConfigTable& table) {
    auto it = schema.find(section);
    if (it == schema.end()) throw ConfigError(section, table.line, "unknown table");
    for (const auto& [key, value] : table.values) {
      if (!it->second.count(key)) {
        throw ConfigError(Dotted(section, key), value.line, "unknown key");
      }
    }
  };
  check_table("", doc.root);
  for (const auto& [name, table] : doc.sections) check_table(name, table);
}

void ApplyOverride(ConfigDocument& doc, const ConfigOverride& ov) {
  const std::string& dotted = ov.first;
  const std::size_t dot = dotted.find('.');
  const std::string section = dot == std::string::npos ? "" : dotted.substr(0, dot);
  const std::string key = dot == std::string::npos ? dotted : dotted.substr(dot + 1);
  const Schema& schema = ConfigSchema();
  auto it = schema.find(section);
  if (it == schema.end() || !it->second.count(key)) {
    throw ConfigError(dotted, 0, "unknown key");
  }
  ConfigValue value;
  try {
    value = parse_value_literal(ov.second);
  } catch (const ConfigError& e) {
    throw ConfigError(dotted, 0, e.what());
  }
  ConfigTable& table = section.empty() ? doc.root : doc.sections[section];
  table.values[key] = std::move(value);
}

// Typed lookups with defaults; errors carry the dotted key and line.
class Reader {
 public:
  explicit Reader(const ConfigDocument& doc) : doc_(doc) {}

  const ConfigValue* Find(const std::string& section, const std::string& key) const {
    const ConfigTable* table = &doc_.root;
    if (!section.empty()) {
      auto it = doc_.sections.find(section);
      if (it == doc_.sections.end()) return nullptr;
      table = &it->second;
    }
    auto v = table->values.find(key);
    return v == table->values.end() ? nullptr : &v->second;
  }

  int Line(const std::string& section, const std::string& key) const {
    const ConfigValue* v = Find(section, key);
    return v ? v->line : 0;
  }

  double Number(const std::string& section, const std::string& key, double def) const {
    const ConfigValue* v = Find(section, key);
    return v ? as_number(*v, Dotted(section, key)) : def;
  }

  double Positive(const std::string& section, const std::string& key, double def) const {
    const double x = Number(section, key, def);
    if (!(x > 0.0)) {
      throw ConfigError(Dotted(section, key), Line(section, key), "must be positive");
    }
    return x;
  }

  double NonNegative(const std::string& section, const std::string& key,
                     double def) const {
    const double x = Number(section, key, def);
    if (!(x >= 0.0)) {
      throw ConfigError(Dotted(section, key), Line(section, key), "must be >= 0");
    }
    return x;
  }

  std::uint64_t Unsigned(const std::string& section, const std::string& key,
                         std::uint64_t def) const {
    const ConfigValue* v = Find(section, key);
    if (!v) return def;
    const double x = as_number(*v, Dotted(section, key));
    if (!(x >= 0.0) || x != std::floor(x) || x > 9007199254740992.0) {
      throw ConfigError(Dotted(section, key), v->line, "expected a non-negative integer");
    }
    return static_cast<std::uint64_t>(x);
  }

  int Count(const std::string& section, const std::string& key, int def) const {
    const std::uint64_t n = Unsigned(section, key, static_cast<std::uint64_t>(def));
    if (n < 1 || n > 100000) {
      throw ConfigError(Dotted(section, key), Line(section, key), "count out of range");
    }
    return static_cast<int>(n);
  }

  bool Bool(const std::string& section, const std::string& key, bool def) const {
    const ConfigValue* v = Find(section, key);
    return v ? as_bool(*v, Dotted(section, key)) : def;
  }

  std::string String(const std::string& section, const std::string& key,
                     const std::string& def) const {
    const ConfigValue* v = Find(section, key);
    return v ? as_string(*v, Dotted(section, key)) : def;
  }

  std::vector<double> Speeds(const std::string& section, const std::string& key,
                             std::vector<double> def) const {
    const ConfigValue* v = Find(section, key);
    if (!v) return def;
    std::vector<double> out = as_number_array(*v, Dotted(section, key));
    for (double x : out) {
      if (!(x > 0.0)) throw ConfigError(Dotted(section, key), v->line, "speeds must be positive");
    }
    return out;
  }

  std::vector<std::string> Strings(const std::string& section, const std::string& key,
                                   std::vector<std::string> def) const {
    const ConfigValue* v = Find(section, key);
    return v ? as_string_array(*v, Dotted(section, key)) : def;
  }

 private:
  const ConfigDocument& doc_;
};

// Runs a validator and reports its failure against a config key.
template <typename F>
void Checked(const Reader& r, const std::string& section, F&& validate) {
  try {
    validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    int line = 0;
    for (const std::string& key : ConfigSchema().at(section)) {
      line = std::max(line, r.Line(section, key));
    }
    throw ConfigError(section, line, e.what());
  }
}

std::uint64_t ParseSeed(const std::string& text, const std::string& name) {
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("scenario.path", 0, "malformed suite name '" + name + "'");
  }
}

std::string FormatSpeed(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string JoinPath(const std::string& dir, const std::string& file) {
  return (fs::path(dir) / file).string();
}

template <typename Writer>
void EmitCsv(const RunConfig& cfg, const std::string& name, CommandOutcome& outcome,
             Writer&& writer) {
  std::ostringstream os;
  writer(os);
  const std::string file = JoinPath(cfg.out_dir, name);
  write_file_atomic(file, os.str());
  outcome.outputs.push_back(file);
}

void RequireUniformPlant(const RunConfig& cfg) {
  if (cfg.plant == PlantChoice::kCurvatureSlip) {
    throw ConfigError("scenario.plant", 0,
                      "curvature_slip depends on a single path; sweeps and tuning need "
                      "ideal, dynamic or constant_slip");
  }
}

void WriteTransitions(std::ostream& out, const std::string& label,
                      const MetricReport& report) {
  for (const TransitionMax& t : report.transitions) {
    out << label << ',' << t.transition.id << ',' << t.transition.s << ','
        << transition_name(t.transition.kind) << ',' << t.max_error << ','
        << t.samples << '\n';
  }
}

}  // namespace

PlantChoice parse_plant(const std::string& name) {
  if (name == "ideal") return PlantChoice::kIdeal;
  if (name == "dynamic") return PlantChoice::kDynamic;
  if (name == "constant_slip") return PlantChoice::kConstantSlip;
  if (name == "curvature_slip") return PlantChoice::kCurvatureSlip;
  throw InvalidArgument("unknown plant '" + name +
                        "' (ideal, dynamic, constant_slip, curvature_slip)");
}

const char* plant_name(PlantChoice plant) {
  switch (plant) {
    case PlantChoice::kIdeal: return "ideal";
    case PlantChoice::kDynamic: return "dynamic";
    case PlantChoice::kConstantSlip: return "constant_slip";
    case PlantChoice::kCurvatureSlip: return "curvature_slip";
  }
  return "?";
}

std::vector<PathModel> resolve_paths(const std::string& name, const std::string& base_dir,
                                     int suite_count) {
  if (name == "validation") return {build_validation_path()};
  if (name == "avoidance") return {build_avoidance_path()};
  if (name.rfind("suite:", 0) == 0) {
    const std::string rest = name.substr(6);
    const std::size_t colon = rest.find(':');
    const std::uint64_t seed = ParseSeed(rest.substr(0, colon), name);
    std::vector<PathModel> suite = generate_suite(seed, suite_count);
    if (colon == std::string::npos) return suite;
    const std::uint64_t index = ParseSeed(rest.substr(colon + 1), name);
    if (index >= suite.size()) {
      throw ConfigError("scenario.path", 0, "suite index out of range in '" + name + "'");
    }
    return {suite[index]};
  }
  fs::path file(name);
  if (file.is_relative()) file = fs::path(base_dir) / file;
  if (!fs::exists(file)) {
    throw ConfigError("scenario.path", 0, "path file not found: " + file.string());
  }
  return {load_path_file(file.string())};
}

RunConfig parse_config(const std::string& text, const std::vector<ConfigOverride>& overrides,
                       const std::string& base_dir) {
  ConfigDocument doc = parse_document(text);
  std::string hashed = text;
  for (const ConfigOverride& ov : overrides) {
    ApplyOverride(doc, ov);
    hashed += "\n" + ov.first + "=" + ov.second;
  }
  CheckSchema(doc);
  const Reader r(doc);

  RunConfig cfg;
  cfg.config_hash = fnv1a64(hashed);

  const ConfigValue* version = r.Find("", "schema_version");
  if (!version) throw ConfigError("schema_version", 0, "missing");
  if (as_number(*version, "schema_version") != kConfigSchemaVersion) {
    throw ConfigError("schema_version", version->line,
                      "unsupported version (expected " +
                          std::to_string(kConfigSchemaVersion) + ")");
  }

  // [scenario]
  cfg.path_name = r.String("scenario", "path", cfg.path_name);
  try {
    cfg.controller.kind = parse_controller(r.String("scenario", "controller", "predictive"));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("scenario.controller", r.Line("scenario", "controller"), e.what());
  }
  try {
    cfg.plant = parse_plant(r.String("scenario", "plant", plant_name(cfg.plant)));
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError("scenario.plant", r.Line("scenario", "plant"), e.what());
  }
  cfg.vehicle.speed = r.Positive("scenario", "speed", 1.0);
  cfg.seed = r.Unsigned("scenario", "seed", 0);
  cfg.initial_lateral_shift = r.Number("scenario", "lateral_shift", 0.0);
  cfg.initial_heading_error = r.Number("scenario", "heading_error", 0.0);

  // [offset]
  cfg.offset.longitudinal = r.Number("offset", "longitudinal", 0.0);
  cfg.offset.lateral = r.Number("offset", "lateral", 0.0);

  // [vehicle]
  VehicleParams& veh = cfg.vehicle;
  veh.wheelbase = r.Positive("vehicle", "wheelbase", veh.wheelbase);
  veh.delta_max = r.Positive("vehicle", "delta_max", veh.delta_max);
  veh.tau_steer = r.NonNegative("vehicle", "tau_steer", veh.tau_steer);
  veh.cornering_stiffness =
      r.Positive("vehicle", "cornering_stiffness", veh.cornering_stiffness);
  veh.mass = r.Positive("vehicle", "mass", veh.mass);
  veh.yaw_inertia = r.Positive("vehicle", "yaw_inertia", veh.yaw_inertia);
  veh.cg_front_fraction = r.Number("vehicle", "cg_front_fraction", veh.cg_front_fraction);
  Checked(r, "vehicle", [&] { veh.Validate(); });

  // [slip]
  cfg.slip.beta_r = r.Number("slip", "beta_r", 0.0);
  cfg.slip.beta_f = r.Number("slip", "beta_f", 0.0);
  cfg.slip.ramp_time = r.NonNegative("slip", "ramp_time", 0.0);
  cfg.slip.gain_r = r.Number("slip", "gain_r", 0.0);
  cfg.slip.gain_f = r.Number("slip", "gain_f", 0.0);

  // Controllers. The predictive horizon defaults to the canonical slot's value.
  const double lambda = r.Positive("predictive", "lambda", 0.15);
  const double k_psi = r.Positive("predictive", "k_psi", 0.6);
  double s_h_default = 1.0;
  if (const CanonicalOffset* slot = find_canonical(cfg.offset)) {
    s_h_default = canonical_predictive_gains(slot->front).s_h;
  }
  const double s_h = r.Positive("predictive", "s_h", s_h_default);
  const double delta_s = r.Positive("predictive", "delta_s", 0.1);
  Checked(r, "predictive", [&] {
    cfg.controller.predictive = PredictiveGains::WithHorizon(lambda, k_psi, s_h, delta_s);
    cfg.controller.predictive.Validate();
  });
  cfg.controller.backstepping.k_y = r.Positive("backstepping", "k_y", 0.15);
  cfg.controller.backstepping.k_psi = r.Positive("backstepping", "k_psi", 0.6);
  cfg.controller.servoing.k_d = r.Positive("servoing", "k_d", cfg.controller.servoing.k_d);
  cfg.controller.servoing.k_p = r.Positive("servoing", "k_p", cfg.controller.servoing.k_p);

  // [observer], [sim]
  cfg.sim.use_observer = r.Bool("observer", "enabled", true);
  cfg.sim.observer.g_y = r.Positive("observer", "g_y", cfg.sim.observer.g_y);
  cfg.sim.observer.g_psi = r.Positive("observer", "g_psi", cfg.sim.observer.g_psi);
  cfg.sim.dt = r.Positive("sim", "dt", cfg.sim.dt);
  cfg.sim.control_period = r.Positive("sim", "control_period", cfg.sim.control_period);
  cfg.sim.corridor = r.Positive("sim", "corridor", cfg.sim.corridor);

  // [tune]
  TuneSettings& tn = cfg.tune;
  tn.s_h_min = r.Positive("tune", "s_h_min", tn.s_h_min);
  tn.s_h_max = r.Positive("tune", "s_h_max", tn.s_h_max);
  tn.step = r.Positive("tune", "step", tn.step);
  tn.delta_s = r.Positive("tune", "delta_s", tn.delta_s);
  tn.training_seed = r.Unsigned("tune", "training_seed", tn.training_seed);
  tn.training_count = r.Count("tune", "training_count", tn.training_count);
  tn.speeds = r.Speeds("tune", "speeds", tn.speeds);
  tn.mirror_balanced = r.Bool("tune", "mirror_balanced", tn.mirror_balanced);
  if (tn.s_h_max < tn.s_h_min) {
    throw ConfigError("tune.s_h_max", r.Line("tune", "s_h_max"), "must be >= tune.s_h_min");
  }

  // [sweep]
  SweepSettings& sw = cfg.sweep;
  sw.suite_seed = r.Unsigned("sweep", "suite_seed", sw.suite_seed);
  sw.suite_count = r.Count("sweep", "suite_count", sw.suite_count);
  sw.speeds = r.Speeds("sweep", "speeds", sw.speeds);
  sw.extent = r.NonNegative("sweep", "extent", sw.extent);
  sw.step = r.Positive("sweep", "step", sw.step);
  sw.mirror_balanced = r.Bool("sweep", "mirror_balanced", sw.mirror_balanced);
  sw.tune_horizon = r.Bool("sweep", "tune_horizon", sw.tune_horizon);
  sw.tune_step = r.Positive("sweep", "tune_step", sw.tune_step);

  // [compare]
  if (r.Find("compare", "controllers")) {
    cfg.compare.controllers.clear();
    for (const std::string& name : r.Strings("compare", "controllers", {})) {
      try {
        cfg.compare.controllers.push_back(parse_controller(name));
      } catch (const Error& e) {
        throw ConfigError("compare.controllers", r.Line("compare", "controllers"), e.what());
      }
    }
    if (cfg.compare.controllers.empty()) {
      throw ConfigError("compare.controllers", r.Line("compare", "controllers"),
                        "at least one controller is required");
    }
  }
  cfg.compare.observer_ablation = r.Bool("compare", "observer_ablation", false);

  cfg.out_dir = r.String("output", "dir", cfg.out_dir);

  // Paths last: their feasibility depends on the offset.
  try {
    cfg.paths = resolve_paths(cfg.path_name, base_dir, cfg.sweep.suite_count);
  } catch (const ConfigError& e) {
    throw ConfigError("scenario.path", r.Line("scenario", "path"), e.what());
  }
  for (const PathModel& path : cfg.paths) {
    if (!offset_feasible_for(path, cfg.offset)) {
      std::ostringstream msg;
      msg << "offset (" << cfg.offset.longitudinal << ", " << cfg.offset.lateral
          << ") is infeasible for path '" << cfg.path_name
          << "' with max curvature " << path.MaxAbsCurvature() << " 1/m";
      throw FeasibilityError(msg.str(), path.MaxAbsCurvature());
    }
  }
  return cfg;
}

RunConfig load_config(const std::string& filename,
                      const std::vector<ConfigOverride>& overrides) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(filename, 0, "cannot open config file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const fs::path parent = fs::path(filename).parent_path();
  return parse_config(buffer.str(), overrides, parent.empty() ? "." : parent.string());
}

PlantKind make_plant(const RunConfig& cfg, const std::shared_ptr<const PathModel>& path) {
  switch (cfg.plant) {
    case PlantChoice::kIdeal:
      return IdealKinematic{};
    case PlantChoice::kDynamic:
      return DynamicSingleTrack{};
    case PlantChoice::kConstantSlip:
      if (cfg.slip.ramp_time > 0.0) {
        return PrescribedSlip{ramp_slip(cfg.slip.beta_r, cfg.slip.beta_f, cfg.slip.ramp_time)};
      }
      return PrescribedSlip{constant_slip(cfg.slip.beta_r, cfg.slip.beta_f)};
    case PlantChoice::kCurvatureSlip:
      return PrescribedSlip{
          curvature_proportional_slip(path, cfg.slip.gain_r, cfg.slip.gain_f)};
  }
  return IdealKinematic{};
}

Scenario make_scenario(const RunConfig& cfg, const PathModel& path) {
  Scenario sc;
  sc.path = std::make_shared<const PathModel>(path);
  sc.plant = make_plant(cfg, sc.path);
  sc.controller = cfg.controller;
  sc.offset = cfg.offset;
  sc.vehicle = cfg.vehicle;
  sc.sim = cfg.sim;
  sc.seed = cfg.seed;
  sc.initial_lateral_shift = cfg.initial_lateral_shift;
  sc.initial_heading_error = cfg.initial_heading_error;
  return sc;
}

SweepBase make_sweep_base(const RunConfig& cfg) {
  RequireUniformPlant(cfg);
  SweepBase base;
  base.plant = make_plant(cfg, nullptr);
  base.controller = cfg.controller;
  base.vehicle = cfg.vehicle;
  base.sim = cfg.sim;
  base.seed = cfg.seed;
  base.mirror_balanced = cfg.sweep.mirror_balanced;
  return base;
}

std::vector<CompareRow> compare(const RunConfig& cfg) {
  if (cfg.paths.empty()) throw InvalidArgument("no path to compare on");
  std::vector<CompareRow> rows;
  for (ControllerKind kind : cfg.compare.controllers) {
    rows.push_back({controller_name(kind), kind, cfg.sim.use_observer, false, "", {}});
    if (cfg.compare.observer_ablation) {
      rows.push_back({std::string(controller_name(kind)) + "/no_observer", kind, false,
                      false, "", {}});
    }
  }
  const PathModel& path = cfg.paths.front();
  parallel_for(rows.size(), [&](std::size_t i) {
    CompareRow& row = rows[i];
    Scenario sc = make_scenario(cfg, path);
    sc.controller.kind = row.controller;
    sc.sim.use_observer = row.observer;
    try {
      const RunLog log = run(sc);
      row.report = metrics(log, path);
      row.ok = !log.aborted;
      if (log.aborted) row.error = log.abort_reason;
    } catch (const Error& e) {
      row.ok = false;
      row.error = e.what();
    }
  });
  return rows;
}

double HorizonTable::Lookup(double speed, bool front_group) const {
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    if (std::abs(speeds[i] - speed) < 1e-9) return front_group ? front[i] : rear[i];
  }
  throw InvalidArgument("no tuned horizon for speed " + std::to_string(speed));
}

HorizonTable tune_horizon_table(const RunConfig& cfg) {
  HorizonTable table;
  const SweepBase base = make_sweep_base(cfg);
  const std::vector<PathModel> training =
      generate_suite(cfg.tune.training_seed, cfg.tune.training_count, PathRole::kTraining);
  const CanonicalOffset* front = nullptr;
  const CanonicalOffset* rear = nullptr;
  const std::vector<CanonicalOffset> slots = canonical_offsets();
  for (const CanonicalOffset& slot : slots) {
    if (slot.name == "FL") front = &slot;
    if (slot.name == "RL") rear = &slot;
  }
  for (double speed : cfg.sweep.speeds) {
    table.speeds.push_back(speed);
    for (const CanonicalOffset* slot : {front, rear}) {
      TuneSpec spec;
      spec.s_h_min = cfg.tune.s_h_min;
      spec.s_h_max = cfg.tune.s_h_max;
      spec.step = cfg.sweep.tune_step;
      spec.target_delta_s = cfg.tune.delta_s;
      spec.training_paths = training;
      spec.velocity = speed;
      spec.offset = slot->offset;
      spec.mirror_balanced = cfg.tune.mirror_balanced;
      const TuneResult result = tune(spec, base);
      (slot->front ? table.front : table.rear).push_back(result.s_h_star);
    }
  }
  return table;
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t hash = 14695981039346656037ULL;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  return hash;
}

void write_file_atomic(const std::string& filename, const std::string& content) {
  const fs::path target(filename);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

CommandOutcome run_simulate(const RunConfig& cfg) {
  CommandOutcome outcome;
  const std::size_t n = cfg.paths.size();
  std::vector<RunLog> logs(n);
  std::vector<MetricReport> reports(n);
  std::vector<std::string> errors(n);
  parallel_for(n, [&](std::size_t i) {
    try {
      logs[i] = run(make_scenario(cfg, cfg.paths[i]));
      reports[i] = metrics(logs[i], cfg.paths[i]);
      if (logs[i].aborted) errors[i] = logs[i].abort_reason;
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });

  for (std::size_t i = 0; i < n; ++i) {
    const std::string name = n == 1 ? "log.csv" : "log_" + std::to_string(i) + ".csv";
    if (!logs[i].records.empty()) {
      EmitCsv(cfg, name, outcome, [&](std::ostream& os) { write_log_csv(logs[i], os); });
    }
    for (const RunEvent& ev : logs[i].events) {
      outcome.warnings.push_back("path " + std::to_string(i) + " step " +
                                 std::to_string(ev.step) + ": " + ev.message);
    }
    if (!errors[i].empty()) {
      outcome.all_ok = false;
      outcome.warnings.push_back("path " + std::to_string(i) + ": " + errors[i]);
    }
  }
  EmitCsv(cfg, "metrics.csv", outcome, [&](std::ostream& os) {
    os << "path,status,median_m,iqr_m,rmse_m,max_m,samples\n" << std::setprecision(10);
    for (std::size_t i = 0; i < n; ++i) {
      const MetricReport& m = reports[i];
      os << i << ',' << (errors[i].empty() ? "ok" : "failed") << ',' << m.median << ','
         << m.iqr << ',' << m.rmse << ',' << m.max << ',' << m.samples << '\n';
    }
  });
  EmitCsv(cfg, "transitions.csv", outcome, [&](std::ostream& os) {
    os << "path,transition_id,s_m,kind,max_error_m,samples\n" << std::setprecision(10);
    for (std::size_t i = 0; i < n; ++i) WriteTransitions(os, std::to_string(i), reports[i]);
  });
  return outcome;
}

CommandOutcome run_tune(const RunConfig& cfg) {
  CommandOutcome outcome;
  const SweepBase base = make_sweep_base(cfg);
  const std::vector<PathModel> training =
      generate_suite(cfg.tune.training_seed, cfg.tune.training_count, PathRole::kTraining);
  std::vector<double> speeds = cfg.tune.speeds;
  if (speeds.empty()) speeds.push_back(cfg.vehicle.speed);

  std::vector<TuneResult> results;
  for (double speed : speeds) {
    TuneSpec spec;
    spec.s_h_min = cfg.tune.s_h_min;
    spec.s_h_max = cfg.tune.s_h_max;
    spec.step = cfg.tune.step;
    spec.target_delta_s = cfg.tune.delta_s;
    spec.training_paths = training;
    spec.velocity = speed;
    spec.offset = cfg.offset;
    spec.mirror_balanced = cfg.tune.mirror_balanced;
    results.push_back(tune(spec, base));
    const TuneResult& res = results.back();
    EmitCsv(cfg, "tune_curve_v" + FormatSpeed(speed) + ".csv", outcome,
            [&](std::ostream& os) { write_curve_csv(res, os); });
    for (const std::string& w : res.warnings) {
      outcome.warnings.push_back("v=" + FormatSpeed(speed) + ": " + w);
      outcome.all_ok = false;
    }
  }
  EmitCsv(cfg, "tune_summary.csv", outcome, [&](std::ostream& os) {
    os << "speed_mps,s_h_star_m,rmse_star_m,flat_interval_5pct_m\n" << std::setprecision(10);
    for (std::size_t i = 0; i < speeds.size(); ++i) {
      os << speeds[i] << ',' << results[i].s_h_star << ',' << results[i].rmse_star << ','
         << flat_interval_length(results[i], 0.05) << '\n';
    }
  });
  return outcome;
}

CommandOutcome run_sweep_speed(const RunConfig& cfg) {
  CommandOutcome outcome;
  SweepBase base = make_sweep_base(cfg);
  base.controller.kind = ControllerKind::kPredictive;
  if (cfg.sweep.tune_horizon) {
    const HorizonTable table = tune_horizon_table(cfg);
    EmitCsv(cfg, "speed_horizons.csv", outcome, [&](std::ostream& os) {
      os << "speed_mps,front_s_h_m,rear_s_h_m\n" << std::setprecision(10);
      for (std::size_t i = 0; i < table.speeds.size(); ++i) {
        os << table.speeds[i] << ',' << table.front[i] << ',' << table.rear[i] << '\n';
      }
    });
    base.horizon = [table](double speed, bool front) { return table.Lookup(speed, front); };
  }
  const std::vector<PathModel> suite =
      generate_suite(cfg.sweep.suite_seed, cfg.sweep.suite_count);
  const std::vector<SpeedRow> rows = sweep_speed(base, suite, cfg.sweep.speeds);
  for (const SpeedRow& row : rows) {
    if (row.stats.failed_runs > 0) {
      outcome.all_ok = false;
      outcome.warnings.push_back("v=" + FormatSpeed(row.speed) + " " + row.group + ": " +
                                 std::to_string(row.stats.failed_runs) + " failed runs");
    }
  }
  EmitCsv(cfg, "speed_sweep.csv", outcome,
          [&](std::ostream& os) { write_speed_csv(rows, os); });
  return outcome;
}

CommandOutcome run_sweep_offset(const RunConfig& cfg) {
  CommandOutcome outcome;
  SweepBase base = make_sweep_base(cfg);
  base.controller.kind = ControllerKind::kPredictive;
  const std::vector<PathModel> suite =
      generate_suite(cfg.sweep.suite_seed, cfg.sweep.suite_count);
  const std::vector<OffsetCell> cells =
      sweep_offset(base, suite, cfg.vehicle.speed, cfg.sweep.extent, cfg.sweep.step);
  std::size_t failed = 0;
  for (const OffsetCell& c : cells) failed += c.stats.failed_runs;
  if (failed > 0) {
    outcome.all_ok = false;
    outcome.warnings.push_back(std::to_string(failed) + " failed runs in the offset grid");
  }
  EmitCsv(cfg, "offset_sweep.csv", outcome,
          [&](std::ostream& os) { write_offset_csv(cells, os); });
  return outcome;
}

CommandOutcome run_compare(const RunConfig& cfg) {
  CommandOutcome outcome;
  const std::vector<CompareRow> rows = compare(cfg);
  for (const CompareRow& row : rows) {
    if (!row.ok) {
      outcome.all_ok = false;
      outcome.warnings.push_back(row.label + ": " + row.error);
    }
  }
  EmitCsv(cfg, "comparison.csv", outcome, [&](std::ostream& os) {
    os << "controller,observer,status,median_m,iqr_m,rmse_m,p25_m,p75_m,max_m,samples\n"
       << std::setprecision(10);
    for (const CompareRow& row : rows) {
      const MetricReport& m = row.report;
      os << controller_name(row.controller) << ',' << (row.observer ? "on" : "off") << ','
         << (row.ok ? "ok" : "failed") << ',' << m.median << ',' << m.iqr << ',' << m.rmse
         << ',' << m.p25 << ',' << m.p75 << ',' << m.max << ',' << m.samples << '\n';
    }
  });
  EmitCsv(cfg, "comparison_transitions.csv", outcome, [&](std::ostream& os) {
    os << "label,transition_id,s_m,kind,max_error_m,samples\n" << std::setprecision(10);
    for (const CompareRow& row : rows) WriteTransitions(os, row.label, row.report);
  });
  return outcome;
}

void write_manifest(const RunConfig& cfg, const std::string& command,
                    const CommandOutcome& outcome) {
  std::ostringstream hash;
  hash << std::hex << std::setw(16) << std::setfill('0') << cfg.config_hash;
  nlohmann::json j;
  j["command"] = command;
  j["status"] = outcome.all_ok ? "ok" : "failed";
  j["config_hash"] = "fnv1a64:" + hash.str();
  j["schema_version"] = cfg.schema_version;
  j["seed"] = cfg.seed;
  j["path"] = cfg.path_name;
  j["plant"] = plant_name(cfg.plant);
  j["controller"] = controller_name(cfg.controller.kind);
  j["suite_seed"] = cfg.sweep.suite_seed;
  j["training_seed"] = cfg.tune.training_seed;
  j["versions"] = {{"offset_track", library_version()},
                   {"compiler", __VERSION__},
                   {"cxx_standard", __cplusplus}};
  j["threads"] = worker_count();
  j["outputs"] = outcome.outputs;
  j["warnings"] = outcome.warnings;
  write_file_atomic(JoinPath(cfg.out_dir, "manifest.json"), j.dump(2) + "\n");
}

const char* library_version() { return OFFSET_TRACK_VERSION; }

}  // namespace offset_track

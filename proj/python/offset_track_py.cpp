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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <map>
#include <string>
#include <vector>

#include "offset_track/cli_runner.hpp"
#include "offset_track/config_doc.hpp"
#include "offset_track/errors.hpp"

namespace py = pybind11;
namespace ot = offset_track;

namespace {

std::vector<ot::ConfigOverride> ToOverrides(const std::map<std::string, std::string>& in) {
  return {in.begin(), in.end()};
}

py::dict MetricsDict(const ot::MetricReport& m) {
  py::dict d;
  d["median"] = m.median;
  d["iqr"] = m.iqr;
  d["rmse"] = m.rmse;
  d["p25"] = m.p25;
  d["p75"] = m.p75;
  d["max"] = m.max;
  d["samples"] = m.samples;
  py::list transitions;
  for (const ot::TransitionMax& t : m.transitions) {
    py::dict row;
    row["id"] = t.transition.id;
    row["s"] = t.transition.s;
    row["kind"] = ot::transition_name(t.transition.kind);
    row["max_error"] = t.max_error;
    row["samples"] = t.samples;
    transitions.append(row);
  }
  d["transitions"] = transitions;
  return d;
}

template <typename Field>
py::array_t<double> Column(const ot::RunLog& log, Field field) {
  py::array_t<double> out(static_cast<py::ssize_t>(log.records.size()));
  auto view = out.mutable_unchecked<1>();
  for (std::size_t i = 0; i < log.records.size(); ++i) {
    view(static_cast<py::ssize_t>(i)) = log.records[i].*field;
  }
  return out;
}

py::dict LogDict(const ot::RunLog& log) {
  using R = ot::LogRecord;
  py::dict d;
  d["t"] = Column(log, &R::t);
  d["s"] = Column(log, &R::s);
  d["x"] = Column(log, &R::x);
  d["y"] = Column(log, &R::y);
  d["heading"] = Column(log, &R::heading);
  d["delta_cmd"] = Column(log, &R::delta_cmd);
  d["delta_actual"] = Column(log, &R::delta_actual);
  d["y_err"] = Column(log, &R::y_err);
  d["psi_err"] = Column(log, &R::psi_err);
  d["e_I"] = Column(log, &R::e_I);
  d["e_true"] = Column(log, &R::e_true);
  d["beta_r_true"] = Column(log, &R::beta_r_true);
  d["beta_f_true"] = Column(log, &R::beta_f_true);
  d["beta_r_hat"] = Column(log, &R::beta_r_hat);
  d["beta_f_hat"] = Column(log, &R::beta_f_hat);
  d["curvature"] = Column(log, &R::curvature);
  return d;
}

py::list Simulate(const ot::RunConfig& cfg) {
  std::vector<ot::RunLog> logs;
  std::vector<ot::MetricReport> reports;
  {
    py::gil_scoped_release release;
    for (const ot::PathModel& path : cfg.paths) {
      logs.push_back(ot::run(ot::make_scenario(cfg, path)));
      reports.push_back(ot::metrics(logs.back(), path));
    }
  }
  py::list out;
  for (std::size_t i = 0; i < logs.size(); ++i) {
    py::dict d;
    d["log"] = LogDict(logs[i]);
    d["metrics"] = MetricsDict(reports[i]);
    d["aborted"] = logs[i].aborted;
    d["abort_reason"] = logs[i].abort_reason;
    py::list events;
    for (const ot::RunEvent& ev : logs[i].events) events.append(py::make_tuple(ev.step, ev.message));
    d["events"] = events;
    out.append(d);
  }
  return out;
}

py::list Compare(const ot::RunConfig& cfg) {
  std::vector<ot::CompareRow> rows;
  {
    py::gil_scoped_release release;
    rows = ot::compare(cfg);
  }
  py::list out;
  for (const ot::CompareRow& row : rows) {
    py::dict d;
    d["label"] = row.label;
    d["controller"] = ot::controller_name(row.controller);
    d["observer"] = row.observer;
    d["ok"] = row.ok;
    d["error"] = row.error;
    d["metrics"] = MetricsDict(row.report);
    out.append(d);
  }
  return out;
}

py::dict Tune(const ot::RunConfig& cfg, double speed) {
  ot::TuneResult res;
  {
    py::gil_scoped_release release;
    ot::TuneSpec spec;
    spec.s_h_min = cfg.tune.s_h_min;
    spec.s_h_max = cfg.tune.s_h_max;
    spec.step = cfg.tune.step;
    spec.target_delta_s = cfg.tune.delta_s;
    spec.training_paths = ot::generate_suite(cfg.tune.training_seed, cfg.tune.training_count,
                                             ot::PathRole::kTraining);
    spec.velocity = speed;
    spec.offset = cfg.offset;
    spec.mirror_balanced = cfg.tune.mirror_balanced;
    res = ot::tune(spec, ot::make_sweep_base(cfg));
  }
  std::vector<double> s_h;
  std::vector<double> rmse;
  for (const ot::CurvePoint& p : res.curve) {
    s_h.push_back(p.s_h);
    rmse.push_back(p.failed ? std::numeric_limits<double>::quiet_NaN() : p.rmse);
  }
  py::dict d;
  d["s_h_star"] = res.s_h_star;
  d["rmse_star"] = res.rmse_star;
  d["s_h"] = py::array_t<double>(s_h.size(), s_h.data());
  d["rmse"] = py::array_t<double>(rmse.size(), rmse.data());
  d["flat_interval_5pct"] = ot::flat_interval_length(res, 0.05);
  d["warnings"] = res.warnings;
  return d;
}

py::dict RunCommand(ot::RunConfig cfg, const std::string& command) {
  static const std::map<std::string, ot::CommandOutcome (*)(const ot::RunConfig&)> commands = {
      {"simulate", ot::run_simulate},       {"tune", ot::run_tune},
      {"sweep-speed", ot::run_sweep_speed}, {"sweep-offset", ot::run_sweep_offset},
      {"compare", ot::run_compare},
  };
  auto it = commands.find(command);
  if (it == commands.end()) throw ot::InvalidArgument("unknown command '" + command + "'");
  cfg.command = command;
  ot::CommandOutcome outcome;
  {
    py::gil_scoped_release release;
    outcome = it->second(cfg);
    ot::write_manifest(cfg, command, outcome);
  }
  py::dict d;
  d["ok"] = outcome.all_ok;
  d["outputs"] = outcome.outputs;
  d["warnings"] = outcome.warnings;
  return d;
}

}  // namespace

PYBIND11_MODULE(_offset_track, m) {
  m.doc() = "Implement-point path tracking core";
  m.attr("__version__") = ot::library_version();

  static py::exception<ot::Error> error(m, "Error", PyExc_RuntimeError);
  py::register_exception<ot::InvalidArgument>(m, "InvalidArgument", error.ptr());
  py::register_exception<ot::DomainError>(m, "DomainError", error.ptr());
  py::register_exception<ot::MatchingError>(m, "MatchingError", error.ptr());
  py::register_exception<ot::FeasibilityError>(m, "FeasibilityError", error.ptr());
  py::register_exception<ot::SingularityError>(m, "SingularityError", error.ptr());
  py::register_exception<ot::DegenerateSpeedError>(m, "DegenerateSpeedError", error.ptr());
  py::register_exception<ot::TuningError>(m, "TuningError", error.ptr());
  py::register_exception<ot::ConfigError>(m, "ConfigError", error.ptr());

  py::class_<ot::Pose2>(m, "Pose2")
      .def(py::init<>())
      .def(py::init([](double x, double y, double heading) { return ot::Pose2{x, y, heading}; }),
           py::arg("x"), py::arg("y"), py::arg("heading"))
      .def_readwrite("x", &ot::Pose2::x)
      .def_readwrite("y", &ot::Pose2::y)
      .def_readwrite("heading", &ot::Pose2::heading);

  py::class_<ot::FrenetState>(m, "FrenetState")
      .def(py::init([](double s, double y, double psi) { return ot::FrenetState{s, y, psi}; }),
           py::arg("s") = 0.0, py::arg("y") = 0.0, py::arg("psi_tilde") = 0.0)
      .def_readwrite("s", &ot::FrenetState::s)
      .def_readwrite("y", &ot::FrenetState::y)
      .def_readwrite("psi_tilde", &ot::FrenetState::psi_tilde);

  py::class_<ot::ImplementOffset>(m, "ImplementOffset")
      .def(py::init([](double ls, double lat) { return ot::ImplementOffset{ls, lat}; }),
           py::arg("longitudinal") = 0.0, py::arg("lateral") = 0.0)
      .def_readwrite("longitudinal", &ot::ImplementOffset::longitudinal)
      .def_readwrite("lateral", &ot::ImplementOffset::lateral)
      .def("norm", &ot::ImplementOffset::Norm);

  py::enum_<ot::PathRole>(m, "PathRole")
      .value("UNSPECIFIED", ot::PathRole::kUnspecified)
      .value("TRAINING", ot::PathRole::kTraining)
      .value("EVALUATION", ot::PathRole::kEvaluation);

  py::class_<ot::PathModel>(m, "PathModel")
      .def_property_readonly("total_length", &ot::PathModel::total_length)
      .def_property_readonly("role", &ot::PathModel::role)
      .def_property_readonly("segment_count",
                             [](const ot::PathModel& p) { return p.segments().size(); })
      .def("pose_at", &ot::PathModel::PoseAt, py::arg("s"))
      .def("curvature_at", [](const ot::PathModel& p, double s) { return ot::curvature_at(p, s); },
           py::arg("s"))
      .def("max_abs_curvature", &ot::PathModel::MaxAbsCurvature)
      .def("joints", &ot::PathModel::Joints)
      .def("mirrored", &ot::PathModel::Mirrored)
      .def("with_role", &ot::PathModel::WithRole, py::arg("role"))
      .def("match", [](const ot::PathModel& p, const ot::Pose2& pose) {
        return ot::match_to_path(p, pose).state;
      });

  py::class_<ot::SuiteOptions>(m, "SuiteOptions").def(py::init<>());
  m.def("build_validation_path", &ot::build_validation_path);
  m.def("build_avoidance_path", &ot::build_avoidance_path);
  m.def("generate_suite", &ot::generate_suite, py::arg("seed"), py::arg("n") = ot::kDefaultSuiteSize,
        py::arg("role") = ot::PathRole::kEvaluation, py::arg("options") = ot::SuiteOptions{});
  m.def("parse_path_document", &ot::parse_path_document, py::arg("text"));
  m.def("load_path_file", &ot::load_path_file, py::arg("filename"));
  m.def("offset_feasible_for", &ot::offset_feasible_for, py::arg("path"), py::arg("offset"));

  m.def("implement_error",
        [](const ot::FrenetState& f, double c, const ot::ImplementOffset& off) {
          const ot::ImplementError e = ot::implement_error(f, c, off);
          py::dict d;
          d["e_I"] = e.e_I;
          d["osculating"] = e.osculating;
          d["epsilon"] = e.epsilon;
          d["r_I"] = e.r_I;
          return d;
        },
        py::arg("frenet"), py::arg("curvature"), py::arg("offset"));

  m.def("horizon_sums",
        [](double lambda, double delta_s, int n_h) {
          const ot::HorizonSums h = ot::horizon_sums(lambda, delta_s, n_h);
          return py::make_tuple(h.sigma1, h.sigma2, h.sigma3, h.sigma_e);
        },
        py::arg("lambda_"), py::arg("delta_s"), py::arg("n_h"),
        "Returns (sigma1, sigma2, sigma3, sigma_e).");

  m.def("percentile", &ot::percentile, py::arg("values"), py::arg("p"));

  py::class_<ot::RunConfig>(m, "RunConfig")
      .def_readonly("path_name", &ot::RunConfig::path_name)
      .def_readwrite("out_dir", &ot::RunConfig::out_dir)
      .def_readonly("seed", &ot::RunConfig::seed)
      .def_readonly("offset", &ot::RunConfig::offset)
      .def_readonly("config_hash", &ot::RunConfig::config_hash)
      .def_property_readonly("speed", [](const ot::RunConfig& c) { return c.vehicle.speed; })
      .def_property_readonly("controller",
                             [](const ot::RunConfig& c) {
                               return ot::controller_name(c.controller.kind);
                             })
      .def_property_readonly("plant", [](const ot::RunConfig& c) { return ot::plant_name(c.plant); })
      .def_property_readonly("lambda_", [](const ot::RunConfig& c) { return c.controller.predictive.lambda; })
      .def_property_readonly("k_psi", [](const ot::RunConfig& c) { return c.controller.predictive.k_psi; })
      .def_property_readonly("s_h", [](const ot::RunConfig& c) { return c.controller.predictive.s_h; })
      .def_property_readonly("paths", [](const ot::RunConfig& c) { return c.paths; });

  m.def("parse_config",
        [](const std::string& text, const std::map<std::string, std::string>& overrides,
           const std::string& base_dir) {
          return ot::parse_config(text, ToOverrides(overrides), base_dir);
        },
        py::arg("text"), py::arg("overrides") = std::map<std::string, std::string>{},
        py::arg("base_dir") = ".");
  m.def("load_config",
        [](const std::string& filename, const std::map<std::string, std::string>& overrides) {
          return ot::load_config(filename, ToOverrides(overrides));
        },
        py::arg("filename"), py::arg("overrides") = std::map<std::string, std::string>{});

  m.def("simulate", &Simulate, py::arg("config"),
        "Runs every configured path; returns per-path dicts with the log columns as arrays.");
  m.def("compare", &Compare, py::arg("config"));
  m.def("tune", &Tune, py::arg("config"), py::arg("speed"));
  m.def("run_command", &RunCommand, py::arg("config"), py::arg("command"),
        "Runs a CLI command and writes its CSVs and manifest under config.out_dir.");
  m.def("fnv1a64", &ot::fnv1a64, py::arg("data"));
}

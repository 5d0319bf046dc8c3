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

// Command-line harness: offset-track <command> --config <file> [--out <dir>]
// [--section.key=value ...]
//
// Exit codes: 0 all runs completed, 1 some run failed, 2 configuration error,
// 3 any other error. Errors are also printed to stderr as one JSON object.

#include <CLI11.hpp>
#include <json.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "offset_track/cli_runner.hpp"
#include "offset_track/errors.hpp"

namespace ot = offset_track;

namespace {

enum ExitCode { kOk = 0, kRunFailed = 1, kConfigInvalid = 2, kInternal = 3 };

std::vector<ot::ConfigOverride> ParseOverrides(const std::vector<std::string>& args) {
  std::vector<ot::ConfigOverride> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& arg = args[i];
    if (arg.rfind("--", 0) != 0 || arg.size() <= 2) {
      throw ot::ConfigError(arg, 0, "unexpected argument");
    }
    const std::string body = arg.substr(2);
    const std::size_t eq = body.find('=');
    if (eq != std::string::npos) {
      out.emplace_back(body.substr(0, eq), body.substr(eq + 1));
    } else if (i + 1 < args.size()) {
      out.emplace_back(body, args[++i]);
    } else {
      throw ot::ConfigError(body, 0, "missing value");
    }
  }
  return out;
}

int ReportError(const std::string& kind, const std::exception& e,
                const nlohmann::json& extra = nlohmann::json::object()) {
  nlohmann::json j = extra;
  j["status"] = "error";
  j["kind"] = kind;
  j["message"] = e.what();
  std::cerr << j.dump() << '\n';
  return kind == "config" || kind == "feasibility" ? kConfigInvalid : kInternal;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Implement-point path tracking benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", ot::library_version());

  std::string config_file;
  std::string out_dir;
  const std::map<std::string, ot::CommandOutcome (*)(const ot::RunConfig&)> commands = {
      {"simulate", ot::run_simulate},       {"tune", ot::run_tune},
      {"sweep-speed", ot::run_sweep_speed}, {"sweep-offset", ot::run_sweep_offset},
      {"compare", ot::run_compare},
  };
  const std::map<std::string, std::string> help = {
      {"simulate", "Closed-loop run(s) on the configured path; writes logs and metrics"},
      {"tune", "Grid search of the prediction horizon on the training suite"},
      {"sweep-speed", "Median error per speed and mounting group on the evaluation suite"},
      {"sweep-offset", "Median error over an (I_s, I_y) grid on the evaluation suite"},
      {"compare", "Controllers side by side on one scenario"},
  };
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name, help.at(name));
    sub->add_option("--config", config_file, "Configuration document")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->allow_extras();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kConfigInvalid;
  }

  CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  try {
    std::vector<ot::ConfigOverride> overrides = ParseOverrides(sub->remaining());
    if (!out_dir.empty()) overrides.emplace_back("output.dir", out_dir);
    ot::RunConfig cfg = ot::load_config(config_file, overrides);
    cfg.command = command;
    const ot::CommandOutcome outcome = commands.at(command)(cfg);
    ot::write_manifest(cfg, command, outcome);
    for (const std::string& w : outcome.warnings) std::cerr << "warning: " << w << '\n';
    for (const std::string& f : outcome.outputs) std::cout << f << '\n';
    if (!outcome.all_ok) {
      nlohmann::json j;
      j["status"] = "failed";
      j["command"] = command;
      j["failures"] = outcome.warnings;
      std::cerr << j.dump() << '\n';
      return kRunFailed;
    }
    return kOk;
  } catch (const ot::ConfigError& e) {
    return ReportError("config", e, {{"key", e.key()}, {"line", e.line()}});
  } catch (const ot::FeasibilityError& e) {
    return ReportError("feasibility", e, {{"max_curvature", e.curvature()}});
  } catch (const ot::Error& e) {
    return ReportError("runtime", e);
  } catch (const std::exception& e) {
    return ReportError("internal", e);
  }
}

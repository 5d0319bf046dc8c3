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

#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "offset_track/path_geometry.hpp"

namespace offset_track {

// Minimal TOML-style document: top-level keys, [section] tables, [[array]]
// tables, and scalar or flat-array values. Enough for configs and path files.
struct ConfigValue {
  using Array = std::vector<ConfigValue>;
  std::variant<double, bool, std::string, Array> data;
  int line = 0;

  bool is_number() const { return std::holds_alternative<double>(data); }
  bool is_bool() const { return std::holds_alternative<bool>(data); }
  bool is_string() const { return std::holds_alternative<std::string>(data); }
  bool is_array() const { return std::holds_alternative<Array>(data); }
};

struct ConfigTable {
  std::map<std::string, ConfigValue> values;
  int line = 0;  // header line, 0 for the root table
};

struct ConfigDocument {
  ConfigTable root;
  std::map<std::string, ConfigTable> sections;
  std::map<std::string, std::vector<ConfigTable>> arrays;
};

// Throws ConfigError with the offending line on malformed input.
ConfigDocument parse_document(const std::string& text);

// Parses a single value literal as it would appear after '='; used for CLI
// overrides. Bare words are accepted as strings.
ConfigValue parse_value_literal(const std::string& text, int line = 0);

// Typed accessors. `where` is the dotted key used in error messages.
double as_number(const ConfigValue& v, const std::string& where);
bool as_bool(const ConfigValue& v, const std::string& where);
std::string as_string(const ConfigValue& v, const std::string& where);
std::vector<double> as_number_array(const ConfigValue& v, const std::string& where);
std::vector<std::string> as_string_array(const ConfigValue& v, const std::string& where);

// Path files: optional schema_version and role, a [start] table (x, y,
// heading) and one [[segment]] per piece (kind = "line" | "arc", length, and
// signed radius for arcs).
PathModel parse_path_document(const std::string& text);
PathModel load_path_file(const std::string& filename);
void write_path_document(const PathModel& path, std::ostream& out);

}  // namespace offset_track

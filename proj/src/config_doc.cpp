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

#include "offset_track/config_doc.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "offset_track/errors.hpp"

namespace offset_track {
namespace {

std::string Trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Drops a trailing comment, ignoring '#' inside strings.
std::string StripComment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

bool ValidKey(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-')) {
      return false;
    }
  }
  return true;
}

std::vector<std::string> SplitArrayItems(const std::string& body, int line) {
  std::vector<std::string> items;
  std::string current;
  bool in_string = false;
  for (char c : body) {
    if (c == '"') in_string = !in_string;
    if (c == ',' && !in_string) {
      items.push_back(Trim(current));
      current.clear();
    } else {
      current += c;
    }
  }
  if (in_string) throw ConfigError("", line, "unterminated string in array");
  const std::string last = Trim(current);
  if (!last.empty()) items.push_back(last);
  for (const std::string& item : items) {
    if (item.empty()) throw ConfigError("", line, "empty array element");
  }
  return items;
}

ConfigValue ParseValue(const std::string& raw, int line, bool allow_bare) {
  const std::string text = Trim(raw);
  if (text.empty()) throw ConfigError("", line, "missing value");
  ConfigValue v;
  v.line = line;
  if (text.front() == '"') {
    if (text.size() < 2 || text.back() != '"') {
      throw ConfigError("", line, "unterminated string");
    }
    v.data = text.substr(1, text.size() - 2);
    return v;
  }
  if (text.front() == '[') {
    if (text.back() != ']') throw ConfigError("", line, "unterminated array");
    ConfigValue::Array arr;
    for (const std::string& item : SplitArrayItems(text.substr(1, text.size() - 2), line)) {
      if (item.front() == '[') throw ConfigError("", line, "nested arrays are not supported");
      arr.push_back(ParseValue(item, line, allow_bare));
    }
    v.data = std::move(arr);
    return v;
  }
  if (text == "true" || text == "false") {
    v.data = (text == "true");
    return v;
  }
  double number = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  if (*first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, number);
  if (ec == std::errc() && ptr == last && std::isfinite(number)) {
    v.data = number;
    return v;
  }
  if (allow_bare) {
    v.data = text;
    return v;
  }
  throw ConfigError("", line, "cannot parse value '" + text + "'");
}

}  // namespace

ConfigDocument parse_document(const std::string& text) {
  ConfigDocument doc;
  ConfigTable* current = &doc.root;
  std::set<std::string> seen_sections;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = Trim(StripComment(raw));
    if (line.empty()) continue;
    if (line.rfind("[[", 0) == 0) {
      if (line.size() < 4 || line.substr(line.size() - 2) != "]]") {
        throw ConfigError("", line_no, "malformed array table header");
      }
      const std::string name = Trim(line.substr(2, line.size() - 4));
      if (!ValidKey(name)) throw ConfigError(name, line_no, "invalid table name");
      if (doc.sections.count(name)) {
        throw ConfigError(name, line_no, "name already used by a [table]");
      }
      auto& list = doc.arrays[name];
      list.emplace_back();
      list.back().line = line_no;
      current = &list.back();
      continue;
    }
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", line_no, "malformed table header");
      const std::string name = Trim(line.substr(1, line.size() - 2));
      if (!ValidKey(name)) throw ConfigError(name, line_no, "invalid table name");
      if (!seen_sections.insert(name).second || doc.arrays.count(name)) {
        throw ConfigError(name, line_no, "duplicate table");
      }
      ConfigTable& table = doc.sections[name];
      table.line = line_no;
      current = &table;
      continue;
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("", line_no, "expected key = value");
    const std::string key = Trim(line.substr(0, eq));
    if (!ValidKey(key)) throw ConfigError(key, line_no, "invalid key");
    if (current->values.count(key)) throw ConfigError(key, line_no, "duplicate key");
    ConfigValue value;
    try {
      value = ParseValue(line.substr(eq + 1), line_no, false);
    } catch (const ConfigError& e) {
      throw ConfigError(key, line_no, e.what());
    }
    current->values.emplace(key, std::move(value));
  }
  return doc;
}

ConfigValue parse_value_literal(const std::string& text, int line) {
  return ParseValue(text, line, true);
}

double as_number(const ConfigValue& v, const std::string& where) {
  if (!v.is_number()) throw ConfigError(where, v.line, "expected a number");
  return std::get<double>(v.data);
}

bool as_bool(const ConfigValue& v, const std::string& where) {
  if (!v.is_bool()) throw ConfigError(where, v.line, "expected true or false");
  return std::get<bool>(v.data);
}

std::string as_string(const ConfigValue& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where, v.line, "expected a string");
  return std::get<std::string>(v.data);
}

std::vector<double> as_number_array(const ConfigValue& v, const std::string& where) {
  if (v.is_number()) return {as_number(v, where)};
  if (!v.is_array()) throw ConfigError(where, v.line, "expected an array of numbers");
  std::vector<double> out;
  for (const ConfigValue& item : std::get<ConfigValue::Array>(v.data)) {
    out.push_back(as_number(item, where));
  }
  return out;
}

std::vector<std::string> as_string_array(const ConfigValue& v, const std::string& where) {
  if (v.is_string()) return {as_string(v, where)};
  if (!v.is_array()) throw ConfigError(where, v.line, "expected an array of strings");
  std::vector<std::string> out;
  for (const ConfigValue& item : std::get<ConfigValue::Array>(v.data)) {
    out.push_back(as_string(item, where));
  }
  return out;
}

PathModel parse_path_document(const std::string& text) {
  const ConfigDocument doc = parse_document(text);
  PathRole role = PathRole::kUnspecified;
  for (const auto& [key, value] : doc.root.values) {
    if (key == "schema_version") {
      if (as_number(value, key) != 1.0) {
        throw ConfigError(key, value.line, "unsupported path schema version");
      }
    } else if (key == "role") {
      const std::string r = as_string(value, key);
      if (r == "training") {
        role = PathRole::kTraining;
      } else if (r == "evaluation") {
        role = PathRole::kEvaluation;
      } else if (r != "unspecified") {
        throw ConfigError(key, value.line, "role must be training or evaluation");
      }
    } else {
      throw ConfigError(key, value.line, "unknown key");
    }
  }
  for (const auto& [name, table] : doc.sections) {
    if (name != "start") throw ConfigError(name, table.line, "unknown table");
  }
  for (const auto& [name, list] : doc.arrays) {
    if (name != "segment") throw ConfigError(name, list.front().line, "unknown table");
  }

  Pose2 start;
  if (auto it = doc.sections.find("start"); it != doc.sections.end()) {
    for (const auto& [key, value] : it->second.values) {
      const std::string where = "start." + key;
      if (key == "x") {
        start.x = as_number(value, where);
      } else if (key == "y") {
        start.y = as_number(value, where);
      } else if (key == "heading") {
        start.heading = as_number(value, where);
      } else {
        throw ConfigError(where, value.line, "unknown key");
      }
    }
  }

  std::vector<SegmentSpec> specs;
  auto seg_it = doc.arrays.find("segment");
  if (seg_it == doc.arrays.end()) throw ConfigError("segment", 0, "path has no segments");
  for (const ConfigTable& seg : seg_it->second) {
    std::string kind;
    double length = NAN;
    double radius = NAN;
    for (const auto& [key, value] : seg.values) {
      const std::string where = "segment." + key;
      if (key == "kind") {
        kind = as_string(value, where);
      } else if (key == "length") {
        length = as_number(value, where);
      } else if (key == "radius") {
        radius = as_number(value, where);
      } else {
        throw ConfigError(where, value.line, "unknown key");
      }
    }
    if (std::isnan(length)) throw ConfigError("segment.length", seg.line, "missing");
    if (kind == "line") {
      if (!std::isnan(radius)) {
        throw ConfigError("segment.radius", seg.line, "lines take no radius");
      }
      specs.push_back(SegmentSpec::Line(length));
    } else if (kind == "arc") {
      if (std::isnan(radius) || radius == 0.0) {
        throw ConfigError("segment.radius", seg.line, "arcs need a nonzero signed radius");
      }
      specs.push_back(SegmentSpec::Arc(length, radius));
    } else {
      throw ConfigError("segment.kind", seg.line, "kind must be line or arc");
    }
  }
  try {
    return PathModel(start, specs, role);
  } catch (const Error& e) {
    throw ConfigError("segment", seg_it->second.front().line, e.what());
  }
}

PathModel load_path_file(const std::string& filename) {
  std::ifstream in(filename);
  if (!in) throw ConfigError(filename, 0, "cannot open path file");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_path_document(buffer.str());
}

void write_path_document(const PathModel& path, std::ostream& out) {
  out << std::setprecision(17);
  out << "schema_version = 1\n";
  if (path.role() == PathRole::kTraining) out << "role = \"training\"\n";
  if (path.role() == PathRole::kEvaluation) out << "role = \"evaluation\"\n";
  const Pose2& start = path.segments().front().start_pose;
  out << "\n[start]\nx = " << start.x << "\ny = " << start.y
      << "\nheading = " << start.heading << "\n";
  for (const SegmentSpec& spec : path.Specs()) {
    out << "\n[[segment]]\n";
    if (spec.kind == SegmentKind::kLine) {
      out << "kind = \"line\"\nlength = " << spec.length << "\n";
    } else {
      out << "kind = \"arc\"\nlength = " << spec.length
          << "\nradius = " << 1.0 / spec.curvature << "\n";
    }
  }
}

}  // namespace offset_track

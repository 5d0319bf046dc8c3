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

#include <stdexcept>
#include <string>

namespace offset_track {

// Base of every error raised by the library. Controllers catch this type to
// implement hold-on-error; anything else escaping is a programming error.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a lookup (e.g. abscissa beyond path end).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Pose too far from the reference path to be matched.
class MatchingError : public Error {
 public:
  MatchingError(const std::string& what, double distance)
      : Error(what), distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

// The offset point is farther from O than the local radius of curvature allows.
class FeasibilityError : public Error {
 public:
  FeasibilityError(const std::string& what, double curvature)
      : Error(what), curvature_(curvature) {}
  double curvature() const { return curvature_; }

 private:
  double curvature_;
};

class SingularityError : public Error {
 public:
  enum class Kind {
    kOsculatingCenter,  // alpha = 1 - c*y = 0
    kLeverArm,          // 1 - gamma*I_y = 0, i.e. v/omega = -I_y
    kHeading,           // |psi_tilde| >= pi/2
    kSideslip,          // cos(beta_R) = 0
  };
  SingularityError(const std::string& what, Kind kind)
      : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

class DegenerateSpeedError : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

class TuningError : public Error {
 public:
  using Error::Error;
};

// Schema violation in a configuration or path document.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& key, int line, const std::string& message)
      : Error(Format(key, line, message)), key_(key), line_(line) {}
  const std::string& key() const { return key_; }
  int line() const { return line_; }

 private:
  static std::string Format(const std::string& key, int line,
                            const std::string& message) {
    std::string out;
    if (!key.empty()) out += "'" + key + "'";
    if (line > 0) out += (out.empty() ? "line " : " (line ") +
                         std::to_string(line) + (key.empty() ? "" : ")");
    if (!out.empty()) out += ": ";
    return out + message;
  }

  std::string key_;
  int line_;
};

}  // namespace offset_track

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

#include <cmath>
#include <numbers>

namespace offset_track {

struct Point2 {
  double x = 0.0;
  double y = 0.0;
};

// World pose of the rear-axle center O.
struct Pose2 {
  double x = 0.0;
  double y = 0.0;
  double heading = 0.0;

  Point2 position() const { return {x, y}; }
};

inline double Distance(const Point2& a, const Point2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Wraps to (-pi, pi].
inline double WrapAngle(double angle) {
  constexpr double kPi = std::numbers::pi;
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  if (angle > -kPi && angle <= kPi) return angle;
  double wrapped = std::fmod(angle + kPi, kTwoPi);
  if (wrapped <= 0.0) wrapped += kTwoPi;
  return wrapped - kPi;
}

}  // namespace offset_track

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
#include <optional>
#include <span>
#include <vector>

#include "offset_track/geometry.hpp"

namespace offset_track {

inline constexpr double kDefaultMinTurningRadius = 5.0;
inline constexpr double kDefaultMatchCorridor = 10.0;

enum class SegmentKind { kLine, kArc };

// Construction-time description of a segment; the start pose is derived from
// the previous segment so the assembled path is G1 by construction.
struct SegmentSpec {
  SegmentKind kind = SegmentKind::kLine;
  double length = 0.0;
  double curvature = 0.0;  // 1/m, positive = left turn, 0 for lines

  static SegmentSpec Line(double length) {
    return {SegmentKind::kLine, length, 0.0};
  }
  // Signed radius: positive turns left.
  static SegmentSpec Arc(double length, double signed_radius) {
    return {SegmentKind::kArc, length, 1.0 / signed_radius};
  }
};

struct Segment {
  SegmentKind kind = SegmentKind::kLine;
  Pose2 start_pose;
  double length = 0.0;
  double curvature = 0.0;
};

// Tuner and benchmark keep training and evaluation sets apart through this tag.
enum class PathRole { kUnspecified, kTraining, kEvaluation };

// Piecewise line/arc reference path indexed by curvilinear abscissa. Immutable
// after construction.
class PathModel {
 public:
  PathModel(const Pose2& start, std::span<const SegmentSpec> specs,
            PathRole role = PathRole::kUnspecified,
            double min_turning_radius = kDefaultMinTurningRadius);

  const std::vector<Segment>& segments() const { return segments_; }
  double total_length() const { return total_length_; }
  PathRole role() const { return role_; }
  double min_turning_radius() const { return min_turning_radius_; }

  PathModel WithRole(PathRole role) const;
  // Mirror image about the start pose's longitudinal axis (curvatures negated).
  PathModel Mirrored() const;

  // Abscissa where segment `index` starts.
  double segment_start(std::size_t index) const { return starts_[index]; }
  // Segment containing s; a joint belongs to the downstream segment.
  std::size_t SegmentIndexAt(double s) const;

  Pose2 PoseAt(double s) const;
  double MaxAbsCurvature() const;
  // Abscissae of the joints between consecutive segments.
  std::vector<double> Joints() const;
  std::vector<SegmentSpec> Specs() const;

 private:
  std::vector<Segment> segments_;
  std::vector<double> starts_;
  double total_length_ = 0.0;
  PathRole role_ = PathRole::kUnspecified;
  double min_turning_radius_ = kDefaultMinTurningRadius;
};

// Frenet-frame tracking errors of the rear-axle center O.
struct FrenetState {
  double s = 0.0;
  double y = 0.0;          // positive = left of the path
  double psi_tilde = 0.0;  // heading minus path tangent, in (-pi, pi]
};

// Body-frame coordinates of the controlled implement point I.
struct ImplementOffset {
  double longitudinal = 0.0;  // I_s, positive = front
  double lateral = 0.0;       // I_y, positive = left

  double Norm() const;
};

struct ImplementError {
  double e_I = 0.0;
  double osculating = 0.0;  // e
  double epsilon = 0.0;
  double r_I = 0.0;
};

struct MatchOptions {
  double corridor = kDefaultMatchCorridor;
  // When set, only segments overlapping [hint - window, hint + window] are
  // considered. Used for tracking along paths that come back near themselves.
  std::optional<double> s_hint;
  double window = 25.0;
};

struct PathMatch {
  FrenetState state;
  double distance = 0.0;
  bool ambiguous = false;
};

double curvature_at(const PathModel& path, double s);

PathMatch match_to_path(const PathModel& path, const Pose2& pose,
                        const MatchOptions& options = {});

// Lateral error of the offset point, including the osculating-circle term.
// Throws FeasibilityError when |c * r_I| >= 1.
ImplementError implement_error(const FrenetState& frenet, double curvature,
                               const ImplementOffset& offset);

Point2 implement_world_position(const Pose2& pose, const ImplementOffset& offset);

// Signed distance of a world point from its own closest path point.
double true_implement_error(const PathModel& path, const Point2& implement_point,
                           const MatchOptions& options = {});

// Inverse of matching on segment interiors.
Point2 frenet_to_world(const PathModel& path, double s, double y);

// Offset is feasible when sqrt(I_s^2 + I_y^2) < 1/|c| for every curvature on
// the path.
bool offset_feasible_for(const PathModel& path, const ImplementOffset& offset);

}  // namespace offset_track

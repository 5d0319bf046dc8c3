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

#include "offset_track/path_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "offset_track/errors.hpp"

namespace offset_track {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Abscissa slack tolerated by range checks before raising DomainError.
constexpr double kAbscissaSlack = 1e-9;
constexpr double kTieDistance = 1e-9;
constexpr double kAmbiguousSpread = 0.5;

Pose2 PoseOnSegment(const Segment& seg, double local_s) {
  const Pose2& p0 = seg.start_pose;
  if (seg.kind == SegmentKind::kLine) {
    return {p0.x + local_s * std::cos(p0.heading),
            p0.y + local_s * std::sin(p0.heading), p0.heading};
  }
  const double k = seg.curvature;
  const double h = p0.heading + k * local_s;
  return {p0.x + (std::sin(h) - std::sin(p0.heading)) / k,
          p0.y - (std::cos(h) - std::cos(p0.heading)) / k, h};
}

struct Projection {
  double local_s = 0.0;
  Pose2 foot;
  double distance = 0.0;
  bool clamped = false;  // foot is an endpoint not reached orthogonally
  bool degenerate = false;  // point at an arc center
};

Projection ProjectOnLine(const Segment& seg, const Point2& p) {
  const Pose2& p0 = seg.start_pose;
  const double tx = std::cos(p0.heading);
  const double ty = std::sin(p0.heading);
  const double along = (p.x - p0.x) * tx + (p.y - p0.y) * ty;
  Projection out;
  out.local_s = std::clamp(along, 0.0, seg.length);
  out.clamped = along < 0.0 || along > seg.length;
  out.foot = PoseOnSegment(seg, out.local_s);
  out.distance = Distance(p, out.foot.position());
  return out;
}

Projection ProjectOnArc(const Segment& seg, const Point2& p) {
  const Pose2& p0 = seg.start_pose;
  const double k = seg.curvature;
  const double cx = p0.x - std::sin(p0.heading) / k;
  const double cy = p0.y + std::cos(p0.heading) / k;
  const double dx = p.x - cx;
  const double dy = p.y - cy;
  Projection out;
  if (std::hypot(dx, dy) < 1e-12) {
    // Every arc point is equidistant; report the downstream end.
    out.local_s = seg.length;
    out.foot = PoseOnSegment(seg, seg.length);
    out.distance = Distance(p, out.foot.position());
    out.degenerate = true;
    return out;
  }
  const double sign = k > 0.0 ? 1.0 : -1.0;
  // Polar angle of the arc point at local abscissa 0 as seen from the center.
  const double phi0 = p0.heading - sign * std::numbers::pi / 2.0;
  double sweep = std::atan2(dy, dx) - phi0;  // angle travelled, signed like k
  if (sign > 0.0) {
    sweep = std::fmod(sweep, kTwoPi);
    if (sweep < 0.0) sweep += kTwoPi;
  } else {
    sweep = std::fmod(sweep, kTwoPi);
    if (sweep > 0.0) sweep -= kTwoPi;
  }
  const double local_s = sweep / k;
  if (local_s <= seg.length) {
    out.local_s = local_s;
    out.foot = PoseOnSegment(seg, local_s);
    out.distance = Distance(p, out.foot.position());
    return out;
  }
  const Pose2 start = PoseOnSegment(seg, 0.0);
  const Pose2 end = PoseOnSegment(seg, seg.length);
  const double d_start = Distance(p, start.position());
  const double d_end = Distance(p, end.position());
  out.clamped = true;
  if (d_start < d_end) {
    out.local_s = 0.0;
    out.foot = start;
    out.distance = d_start;
  } else {
    out.local_s = seg.length;
    out.foot = end;
    out.distance = d_end;
  }
  return out;
}

Projection Project(const Segment& seg, const Point2& p) {
  return seg.kind == SegmentKind::kLine ? ProjectOnLine(seg, p)
                                        : ProjectOnArc(seg, p);
}

}  // namespace

PathModel::PathModel(const Pose2& start, std::span<const SegmentSpec> specs,
                     PathRole role, double min_turning_radius)
    : role_(role), min_turning_radius_(min_turning_radius) {
  if (specs.empty()) throw InvalidArgument("path needs at least one segment");
  if (!(min_turning_radius > 0.0)) {
    throw InvalidArgument("minimum turning radius must be positive");
  }
  Pose2 pose = start;
  segments_.reserve(specs.size());
  starts_.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const SegmentSpec& spec = specs[i];
    const std::string where = "segment " + std::to_string(i);
    if (!(spec.length > 0.0) || !std::isfinite(spec.length)) {
      throw InvalidArgument(where + ": length must be positive");
    }
    if (spec.kind == SegmentKind::kLine && spec.curvature != 0.0) {
      throw InvalidArgument(where + ": line segment with nonzero curvature");
    }
    if (spec.kind == SegmentKind::kArc) {
      if (spec.curvature == 0.0 || !std::isfinite(spec.curvature)) {
        throw InvalidArgument(where + ": arc needs a finite nonzero curvature");
      }
      if (1.0 / std::abs(spec.curvature) < min_turning_radius - 1e-12) {
        throw InvalidArgument(where + ": radius below the minimum turning radius");
      }
      if (std::abs(spec.curvature) * spec.length >= kTwoPi) {
        throw InvalidArgument(where + ": arc sweeps a full turn or more");
      }
    }
    Segment seg{spec.kind, pose, spec.length, spec.curvature};
    starts_.push_back(total_length_);
    total_length_ += spec.length;
    pose = PoseOnSegment(seg, spec.length);
    segments_.push_back(seg);
  }
}

PathModel PathModel::WithRole(PathRole role) const {
  PathModel copy = *this;
  copy.role_ = role;
  return copy;
}

PathModel PathModel::Mirrored() const {
  std::vector<SegmentSpec> specs = Specs();
  for (SegmentSpec& spec : specs) spec.curvature = -spec.curvature;
  return PathModel(segments_.front().start_pose, specs, role_,
                   min_turning_radius_);
}

std::size_t PathModel::SegmentIndexAt(double s) const {
  if (!(s >= -kAbscissaSlack && s <= total_length_ + kAbscissaSlack)) {
    throw DomainError("abscissa " + std::to_string(s) + " outside [0, " +
                      std::to_string(total_length_) + "]");
  }
  // Last start <= s, so a joint resolves to the downstream segment.
  auto it = std::upper_bound(starts_.begin(), starts_.end(), s);
  if (it == starts_.begin()) return 0;
  return static_cast<std::size_t>(std::distance(starts_.begin(), it)) - 1;
}

Pose2 PathModel::PoseAt(double s) const {
  const std::size_t i = SegmentIndexAt(s);
  const double local = std::clamp(s - starts_[i], 0.0, segments_[i].length);
  return PoseOnSegment(segments_[i], local);
}

double PathModel::MaxAbsCurvature() const {
  double out = 0.0;
  for (const Segment& seg : segments_) out = std::max(out, std::abs(seg.curvature));
  return out;
}

std::vector<double> PathModel::Joints() const {
  return {starts_.begin() + 1, starts_.end()};
}

std::vector<SegmentSpec> PathModel::Specs() const {
  std::vector<SegmentSpec> specs;
  specs.reserve(segments_.size());
  for (const Segment& seg : segments_) {
    specs.push_back({seg.kind, seg.length, seg.curvature});
  }
  return specs;
}

double ImplementOffset::Norm() const { return std::hypot(longitudinal, lateral); }

double curvature_at(const PathModel& path, double s) {
  return path.segments()[path.SegmentIndexAt(s)].curvature;
}

PathMatch match_to_path(const PathModel& path, const Pose2& pose,
                        const MatchOptions& options) {
  const Point2 p = pose.position();
  const auto& segments = path.segments();

  struct Candidate {
    double s;
    Projection proj;
  };
  std::vector<Candidate> candidates;
  candidates.reserve(segments.size());
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const double start = path.segment_start(i);
    if (options.s_hint) {
      const double lo = *options.s_hint - options.window;
      const double hi = *options.s_hint + options.window;
      if (start + segments[i].length < lo || start > hi) continue;
    }
    Projection proj = Project(segments[i], p);
    candidates.push_back({start + proj.local_s, proj});
  }
  if (candidates.empty()) {
    throw MatchingError("no path segment inside the matching window",
                        std::numeric_limits<double>::infinity());
  }

  const Candidate* best = &candidates.front();
  for (const Candidate& c : candidates) {
    if (c.proj.distance < best->proj.distance - kTieDistance ||
        (std::abs(c.proj.distance - best->proj.distance) <= kTieDistance &&
         c.s > best->s)) {
      best = &c;
    }
  }
  if (best->proj.distance > options.corridor) {
    throw MatchingError("pose is " + std::to_string(best->proj.distance) +
                            " m from the path (corridor " +
                            std::to_string(options.corridor) + " m)",
                        best->proj.distance);
  }

  PathMatch out;
  out.distance = best->proj.distance;
  out.ambiguous = best->proj.degenerate;
  for (const Candidate& c : candidates) {
    if (std::abs(c.proj.distance - best->proj.distance) <= kTieDistance &&
        std::abs(c.s - best->s) > kAmbiguousSpread) {
      out.ambiguous = true;
    }
  }

  const Pose2& foot = best->proj.foot;
  const double nx = -std::sin(foot.heading);
  const double ny = std::cos(foot.heading);
  const double normal_component = (p.x - foot.x) * nx + (p.y - foot.y) * ny;
  out.state.s = std::clamp(best->s, 0.0, path.total_length());
  if (best->proj.clamped) {
    out.state.y = std::copysign(best->proj.distance, normal_component);
  } else {
    out.state.y = normal_component;
  }
  out.state.psi_tilde = WrapAngle(pose.heading - foot.heading);
  return out;
}

ImplementError implement_error(const FrenetState& frenet, double curvature,
                               const ImplementOffset& offset) {
  const double sp = std::sin(frenet.psi_tilde);
  const double cp = std::cos(frenet.psi_tilde);
  const double is = offset.longitudinal;
  const double iy = offset.lateral;
  ImplementError out;
  out.r_I = is * cp + iy * sp;
  if (curvature != 0.0) {
    const double arg = curvature * out.r_I;
    if (!(std::abs(arg) < 1.0)) {
      throw FeasibilityError(
          "implement offset exceeds the radius of curvature (c = " +
              std::to_string(curvature) + ")",
          curvature);
    }
    out.epsilon = std::asin(arg);
    out.osculating = -(1.0 - std::cos(out.epsilon)) / curvature;
  }
  out.e_I = frenet.y + is * sp + iy * cp + out.osculating;
  return out;
}

Point2 implement_world_position(const Pose2& pose, const ImplementOffset& offset) {
  const double c = std::cos(pose.heading);
  const double s = std::sin(pose.heading);
  return {pose.x + offset.longitudinal * c - offset.lateral * s,
          pose.y + offset.longitudinal * s + offset.lateral * c};
}

double true_implement_error(const PathModel& path, const Point2& implement_point,
                           const MatchOptions& options) {
  return match_to_path(path, {implement_point.x, implement_point.y, 0.0}, options)
      .state.y;
}

Point2 frenet_to_world(const PathModel& path, double s, double y) {
  const Pose2 foot = path.PoseAt(s);
  return {foot.x - y * std::sin(foot.heading), foot.y + y * std::cos(foot.heading)};
}

bool offset_feasible_for(const PathModel& path, const ImplementOffset& offset) {
  return offset.Norm() * path.MaxAbsCurvature() < 1.0;
}

}  // namespace offset_track

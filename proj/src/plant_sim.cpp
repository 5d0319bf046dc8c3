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

#include "offset_track/plant_sim.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <utility>

#include "offset_track/errors.hpp"

namespace offset_track {
namespace {

constexpr double kMinDynamicSpeed = 0.1;

SlipAngles ClampSlip(SlipAngles slip) {
  slip.beta_r = std::clamp(slip.beta_r, -kMaxPrescribedSlip, kMaxPrescribedSlip);
  slip.beta_f = std::clamp(slip.beta_f, -kMaxPrescribedSlip, kMaxPrescribedSlip);
  return slip;
}

template <std::size_t N, typename Deriv>
std::array<double, N> Rk4(const std::array<double, N>& x, double dt, Deriv&& f) {
  auto axpy = [](const std::array<double, N>& a, double h,
                 const std::array<double, N>& b) {
    std::array<double, N> out;
    for (std::size_t i = 0; i < N; ++i) out[i] = a[i] + h * b[i];
    return out;
  };
  const auto k1 = f(x);
  const auto k2 = f(axpy(x, 0.5 * dt, k1));
  const auto k3 = f(axpy(x, 0.5 * dt, k2));
  const auto k4 = f(axpy(x, dt, k3));
  std::array<double, N> out;
  for (std::size_t i = 0; i < N; ++i) {
    out[i] = x[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
  return out;
}

}  // namespace

void VehicleParams::Validate(double min_turning_radius) const {
  if (!(wheelbase > 0.0)) throw InvalidArgument("wheelbase must be positive");
  if (!(speed > 0.0)) throw InvalidArgument("speed must be positive");
  if (!(delta_max > 0.0 && delta_max < std::numbers::pi / 2.0)) {
    throw InvalidArgument("delta_max must lie in (0, pi/2)");
  }
  if (!(tau_steer >= 0.0)) throw InvalidArgument("tau_steer must be >= 0");
  if (!(cornering_stiffness > 0.0)) {
    throw InvalidArgument("cornering stiffness must be positive");
  }
  if (!(mass > 0.0) || !(yaw_inertia > 0.0)) {
    throw InvalidArgument("mass and yaw inertia must be positive");
  }
  if (!(cg_front_fraction > 0.0 && cg_front_fraction < 1.0)) {
    throw InvalidArgument("cg_front_fraction must lie in (0, 1)");
  }
  if (MaxCurvature() > 1.0 / min_turning_radius + 1e-12) {
    throw InvalidArgument("tan(delta_max)/L exceeds 1/R_min");
  }
}

double lateral_disturbance(double beta_r, double psi_tilde, double speed) {
  return speed * std::cos(psi_tilde) * std::tan(beta_r);
}

SlipProfile constant_slip(double beta_r, double beta_f) {
  return [beta_r, beta_f](double, const Pose2&) {
    return SlipAngles{beta_r, beta_f};
  };
}

SlipProfile ramp_slip(double beta_r, double beta_f, double ramp_time) {
  return [=](double t, const Pose2&) {
    const double w = ramp_time > 0.0 ? std::clamp(t / ramp_time, 0.0, 1.0) : 1.0;
    return SlipAngles{w * beta_r, w * beta_f};
  };
}

SlipProfile curvature_proportional_slip(std::shared_ptr<const PathModel> path,
                                        double gain_r, double gain_f) {
  return [path = std::move(path), gain_r, gain_f](double, const Pose2& pose) {
    const PathMatch m = match_to_path(*path, pose);
    const double c = curvature_at(*path, m.state.s);
    return SlipAngles{gain_r * c, gain_f * c};
  };
}

double actuator_step(double delta_actual, double delta_cmd, double dt,
                     const VehicleParams& params) {
  const double target = std::clamp(delta_cmd, -params.delta_max, params.delta_max);
  double next = target;
  if (params.tau_steer > 0.0) {
    next = target + (delta_actual - target) * std::exp(-dt / params.tau_steer);
  }
  return std::clamp(next, -params.delta_max, params.delta_max);
}

double kinematic_yaw_rate(double delta, const SlipAngles& slip,
                          const VehicleParams& params) {
  return params.speed * (std::tan(delta + slip.beta_f) - std::tan(slip.beta_r)) *
         std::cos(slip.beta_r) / params.wheelbase;
}

PlantState kinematic_step(const PlantState& state, double delta_cmd, double dt,
                          const VehicleParams& params, const PlantKind& kind) {
  SlipAngles slip;
  if (const auto* prescribed = std::get_if<PrescribedSlip>(&kind)) {
    if (prescribed->profile) slip = ClampSlip(prescribed->profile(state.t, state.pose));
  } else if (std::holds_alternative<DynamicSingleTrack>(kind)) {
    throw InvalidArgument("kinematic_step called with the dynamic plant");
  }

  PlantState next = state;
  next.delta_actual = actuator_step(state.delta_actual, delta_cmd, dt, params);
  const double v = params.speed;
  const double lateral = v * std::tan(slip.beta_r);  // body-frame speed of O
  const double yaw_rate = kinematic_yaw_rate(next.delta_actual, slip, params);

  const std::array<double, 3> x0{state.pose.x, state.pose.y, state.pose.heading};
  const auto x1 = Rk4(x0, dt, [&](const std::array<double, 3>& x) {
    const double c = std::cos(x[2]);
    const double s = std::sin(x[2]);
    return std::array<double, 3>{v * c - lateral * s, v * s + lateral * c, yaw_rate};
  });
  next.pose = {x1[0], x1[1], x1[2]};
  next.yaw_rate = yaw_rate;
  next.lateral_velocity = lateral;
  next.sideslip = {slip.beta_r, slip.beta_f, lateral};
  next.t = state.t + dt;
  return next;
}

LateralDynamicsMatrix single_track_matrix(const VehicleParams& params) {
  const double v = params.speed;
  const double c = params.cornering_stiffness;
  const double a = params.cg_front_fraction * params.wheelbase;
  const double b = params.wheelbase - a;
  const double m = params.mass;
  const double iz = params.yaw_inertia;
  return {-2.0 * c / (m * v),         -(c * a - c * b) / (m * v) - v,
          -(c * a - c * b) / (iz * v), -(c * a * a + c * b * b) / (iz * v),
          c / m,                       c * a / iz};
}

SideslipState dynamic_slip(const PlantState& state, const VehicleParams& params) {
  if (!(params.speed > kMinDynamicSpeed)) {
    throw DegenerateSpeedError("single-track slip undefined below 0.1 m/s");
  }
  const double v = params.speed;
  const double a = params.cg_front_fraction * params.wheelbase;
  const double b = params.wheelbase - a;
  const double vy_rear = state.lateral_velocity - b * state.yaw_rate;
  const double vy_front = state.lateral_velocity + a * state.yaw_rate;
  SideslipState out;
  out.beta_r = std::atan(vy_rear / v);
  out.beta_f = std::atan(vy_front / v) - state.delta_actual;
  out.y_dot_p = vy_rear;
  return out;
}

PlantState dynamic_step(const PlantState& state, double delta_cmd, double dt,
                        const VehicleParams& params) {
  if (!(params.speed > kMinDynamicSpeed)) {
    throw DegenerateSpeedError("single-track plant needs v > 0.1 m/s");
  }
  PlantState next = state;
  next.delta_actual = actuator_step(state.delta_actual, delta_cmd, dt, params);
  const double delta = next.delta_actual;
  const double v = params.speed;
  const double b = params.wheelbase * (1.0 - params.cg_front_fraction);
  const LateralDynamicsMatrix m = single_track_matrix(params);

  // x, y, heading, v_y (CG), yaw rate
  const std::array<double, 5> x0{state.pose.x, state.pose.y, state.pose.heading,
                                 state.lateral_velocity, state.yaw_rate};
  const auto x1 = Rk4(x0, dt, [&](const std::array<double, 5>& x) {
    const double c = std::cos(x[2]);
    const double s = std::sin(x[2]);
    const double vy_rear = x[3] - b * x[4];
    return std::array<double, 5>{
        v * c - vy_rear * s, v * s + vy_rear * c, x[4],
        m.a11 * x[3] + m.a12 * x[4] + m.b1 * delta,
        m.a21 * x[3] + m.a22 * x[4] + m.b2 * delta};
  });
  next.pose = {x1[0], x1[1], x1[2]};
  next.lateral_velocity = x1[3];
  next.yaw_rate = x1[4];
  next.t = state.t + dt;
  next.sideslip = dynamic_slip(next, params);
  return next;
}

PlantState plant_step(const PlantState& state, double delta_cmd, double dt,
                      const VehicleParams& params, const PlantKind& kind) {
  if (std::holds_alternative<DynamicSingleTrack>(kind)) {
    return dynamic_step(state, delta_cmd, dt, params);
  }
  return kinematic_step(state, delta_cmd, dt, params, kind);
}

}  // namespace offset_track

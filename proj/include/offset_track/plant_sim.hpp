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

#include <functional>
#include <memory>
#include <variant>

#include "offset_track/geometry.hpp"
#include "offset_track/path_geometry.hpp"

namespace offset_track {

struct VehicleParams {
  double wheelbase = 2.0;                    // L, m
  double speed = 1.0;                        // v, m/s
  double delta_max = std::atan(2.0 / 5.0);   // arctan(L / R_min)
  double tau_steer = 0.5;                    // actuator time constant, s
  double cornering_stiffness = 7500.0;       // per axle, N/rad
  double mass = 800.0;                       // kg
  double yaw_inertia = 600.0;                // kg m^2
  double cg_front_fraction = 0.5;            // CG-to-front-axle distance / L

  // Throws InvalidArgument on any violated invariant.
  void Validate(double min_turning_radius = kDefaultMinTurningRadius) const;
  double MaxCurvature() const { return std::tan(delta_max) / wheelbase; }
};

struct SideslipState {
  double beta_r = 0.0;
  double beta_f = 0.0;
  // Lateral speed disturbance v * cos(psi_tilde) * tan(beta_r). The plant
  // reports it in the body frame (psi_tilde = 0); see lateral_disturbance().
  double y_dot_p = 0.0;
};

double lateral_disturbance(double beta_r, double psi_tilde, double speed);

struct PlantState {
  Pose2 pose;
  double delta_actual = 0.0;
  SideslipState sideslip;
  double lateral_velocity = 0.0;  // at the CG, dynamic plant only
  double yaw_rate = 0.0;
  double t = 0.0;
};

struct SlipAngles {
  double beta_r = 0.0;
  double beta_f = 0.0;
};

inline constexpr double kMaxPrescribedSlip = 0.2;

// Prescribed sideslip as a function of time and pose. Outputs are clamped to
// +-kMaxPrescribedSlip by the plant.
using SlipProfile = std::function<SlipAngles(double t, const Pose2& pose)>;

struct IdealKinematic {};
struct PrescribedSlip {
  SlipProfile profile;
};
struct DynamicSingleTrack {};

using PlantKind = std::variant<IdealKinematic, PrescribedSlip, DynamicSingleTrack>;

SlipProfile constant_slip(double beta_r, double beta_f);
// Linear ramp from zero to the given values over ramp_time seconds.
SlipProfile ramp_slip(double beta_r, double beta_f, double ramp_time);
// beta = gain * c(s), with s matched on the given path.
SlipProfile curvature_proportional_slip(std::shared_ptr<const PathModel> path,
                                        double gain_r, double gain_f);

// First-order lag toward the clamped command; tau = 0 is instantaneous.
double actuator_step(double delta_actual, double delta_cmd, double dt,
                     const VehicleParams& params);

// psi_dot = v [tan(delta + beta_F) - tan(beta_R)] cos(beta_R) / L
double kinematic_yaw_rate(double delta, const SlipAngles& slip,
                          const VehicleParams& params);

// One fixed step of the kinematic plant (ideal or prescribed slip), RK4.
PlantState kinematic_step(const PlantState& state, double delta_cmd, double dt,
                          const VehicleParams& params, const PlantKind& kind);

// Sideslip angles implied by the single-track lateral states.
SideslipState dynamic_slip(const PlantState& state, const VehicleParams& params);

// One fixed step of the linear single-track plant, RK4.
PlantState dynamic_step(const PlantState& state, double delta_cmd, double dt,
                        const VehicleParams& params);

// Dispatches on kind.
PlantState plant_step(const PlantState& state, double delta_cmd, double dt,
                      const VehicleParams& params, const PlantKind& kind);

// Linear single-track system matrix for states (v_y, r) at the given speed.
struct LateralDynamicsMatrix {
  double a11, a12, a21, a22;  // state matrix
  double b1, b2;              // steering input column
};
LateralDynamicsMatrix single_track_matrix(const VehicleParams& params);

}  // namespace offset_track

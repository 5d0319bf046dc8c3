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

#include "offset_track/path_geometry.hpp"
#include "offset_track/plant_sim.hpp"

namespace offset_track {

inline constexpr double kObserverSlipLimit = 0.3;

struct ObserverGains {
  double g_y = 3.0;    // 1/s, lateral channel (updates beta_R)
  double g_psi = 3.0;  // 1/s, angular channel (updates beta_F)
};

// Model-based innovation observer. Each channel is a second-order error loop
// (estimated deviation, slip) whose discrete poles are placed at exp(-g*dt),
// so both channels settle like a critically damped system with rate g.
struct ObserverState {
  double beta_r_hat = 0.0;
  double beta_f_hat = 0.0;
  double y_hat = 0.0;
  double psi_tilde_hat = 0.0;
  ObserverGains gains;
  bool initialized = false;
  // Set when the last step was skipped because v <= 0.1 m/s.
  bool frozen = false;
  // Inputs held over the next prediction interval.
  double last_psi_tilde = 0.0;
  double last_y = 0.0;
  double last_delta = 0.0;
  double last_curvature = 0.0;

  SideslipState Estimate(double psi_tilde, double speed) const;
};

ObserverState observer_step(const ObserverState& obs, const FrenetState& meas,
                            double delta, double speed, double curvature,
                            double dt, double wheelbase);

// v * cos(psi_tilde) * tan(beta_R_hat)
double disturbance_from(const ObserverState& obs, double psi_tilde, double speed);

}  // namespace offset_track

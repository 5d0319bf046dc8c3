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

#include "offset_track/sideslip_observer.hpp"

#include <algorithm>
#include <cmath>

#include "offset_track/geometry.hpp"

namespace offset_track {
namespace {

constexpr double kMinObserverSpeed = 0.1;

double LateralRate(double psi_tilde, double beta_r, double v) {
  return v * std::sin(psi_tilde) + v * std::cos(psi_tilde) * std::tan(beta_r);
}

double AngularRate(double psi_tilde, double y, double delta, double curvature,
                   double beta_r, double beta_f, double v, double wheelbase) {
  const double alpha = 1.0 - curvature * y;
  return v * (std::tan(delta + beta_f) - std::tan(beta_r)) * std::cos(beta_r) /
             wheelbase -
         curvature * v * std::cos(psi_tilde) / alpha;
}

// Gains of the discrete loop e+ = (1-K1) e-, b+ = b - K2 e- with
// e- = e + dt*sens*b, placing both poles at exp(-g*dt).
struct ChannelGains {
  double k_state;
  double k_slip;
};

ChannelGains PlacePoles(double g, double dt, double sensitivity) {
  const double p = std::exp(-g * dt);
  return {1.0 - p * p, (1.0 - p) * (1.0 - p) / (dt * sensitivity)};
}

}  // namespace

SideslipState ObserverState::Estimate(double psi_tilde, double speed) const {
  return {beta_r_hat, beta_f_hat, lateral_disturbance(beta_r_hat, psi_tilde, speed)};
}

ObserverState observer_step(const ObserverState& obs, const FrenetState& meas,
                            double delta, double speed, double curvature,
                            double dt, double wheelbase) {
  ObserverState next = obs;
  if (!(speed > kMinObserverSpeed) || !(dt > 0.0)) {
    next.frozen = true;
    return next;
  }
  next.frozen = false;
  if (!obs.initialized) {
    next.y_hat = meas.y;
    next.psi_tilde_hat = meas.psi_tilde;
    next.initialized = true;
  } else {
    // Trapezoidal prediction with the inputs held at both interval ends.
    const double v = speed;
    const double y_rate =
        0.5 * (LateralRate(obs.last_psi_tilde, obs.beta_r_hat, v) +
               LateralRate(meas.psi_tilde, obs.beta_r_hat, v));
    const double psi_rate =
        0.5 * (AngularRate(obs.last_psi_tilde, obs.last_y, obs.last_delta,
                           obs.last_curvature, obs.beta_r_hat, obs.beta_f_hat, v,
                           wheelbase) +
               AngularRate(meas.psi_tilde, meas.y, delta, curvature,
                           obs.beta_r_hat, obs.beta_f_hat, v, wheelbase));
    const double y_pred = obs.y_hat + dt * y_rate;
    const double psi_pred = obs.psi_tilde_hat + dt * psi_rate;
    const double innov_y = meas.y - y_pred;
    const double innov_psi = WrapAngle(meas.psi_tilde - psi_pred);

    const double cos_br = std::cos(obs.beta_r_hat);
    const double sens_y =
        v * std::max(std::cos(meas.psi_tilde), 0.5) / (cos_br * cos_br);
    const double cos_front = std::cos(delta + obs.beta_f_hat);
    const double sens_psi = v * cos_br / (wheelbase * cos_front * cos_front);
    const ChannelGains gy = PlacePoles(obs.gains.g_y, dt, sens_y);
    const ChannelGains gp = PlacePoles(obs.gains.g_psi, dt, sens_psi);

    next.y_hat = y_pred + gy.k_state * innov_y;
    next.psi_tilde_hat = WrapAngle(psi_pred + gp.k_state * innov_psi);
    next.beta_r_hat = std::clamp(obs.beta_r_hat + gy.k_slip * innov_y,
                                 -kObserverSlipLimit, kObserverSlipLimit);
    // Carry the rear update into the front estimate so the modelled yaw rate
    // is unchanged by it; the angular channel then only sees its own error.
    const double yaw_term =
        (std::tan(delta + obs.beta_f_hat) - std::tan(obs.beta_r_hat)) * cos_br /
        std::cos(next.beta_r_hat);
    const double beta_f_carried =
        std::atan(std::tan(next.beta_r_hat) + yaw_term) - delta;
    next.beta_f_hat = std::clamp(beta_f_carried + gp.k_slip * innov_psi,
                                 -kObserverSlipLimit, kObserverSlipLimit);
  }
  next.last_psi_tilde = meas.psi_tilde;
  next.last_y = meas.y;
  next.last_delta = delta;
  next.last_curvature = curvature;
  return next;
}

double disturbance_from(const ObserverState& obs, double psi_tilde, double speed) {
  return lateral_disturbance(obs.beta_r_hat, psi_tilde, speed);
}

}  // namespace offset_track

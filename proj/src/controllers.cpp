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

#include "offset_track/controllers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "offset_track/errors.hpp"
#include "offset_track/geometry.hpp"

namespace offset_track {
namespace {

constexpr double kSingularityTolerance = 1e-9;

void CheckHeading(double psi_tilde) {
  if (!(std::abs(psi_tilde) < std::numbers::pi / 2.0)) {
    throw SingularityError("|psi_tilde| >= pi/2", SingularityError::Kind::kHeading);
  }
}

double CheckedAlpha(double curvature, double y) {
  const double alpha = 1.0 - curvature * y;
  if (!(std::abs(alpha) > kSingularityTolerance)) {
    throw SingularityError(
        "robot at the center of the osculating circle (1 - c y = 0)",
        SingularityError::Kind::kOsculatingCenter);
  }
  return alpha;
}

double LeverArmDenominator(const AuxTerms& aux, const ImplementOffset& offset) {
  const double lever = 1.0 - aux.gamma * offset.lateral;
  if (!(std::abs(lever) > kSingularityTolerance)) {
    throw SingularityError("lever-arm singularity (v / omega = -I_y)",
                           SingularityError::Kind::kLeverArm);
  }
  return aux.alpha * lever;
}

// Shared skeleton of the two backstepping-structured laws: the first stage
// (desired_psi) differs, the second stage is steering_law.
template <typename DesiredPsi>
ControlCommand RunBackstepStructure(const ControlMeasurement& meas,
                                    const PathModel& path, double k_psi,
                                    const ImplementOffset& offset,
                                    const VehicleParams& params,
                                    double previous_delta,
                                    DesiredPsi&& desired_psi) {
  ControlCommand out;
  try {
    const FrenetState& f = meas.frenet;
    CheckHeading(f.psi_tilde);
    const double c = curvature_at(path, f.s);
    const ImplementError ie = implement_error(f, c, offset);
    const double alpha = CheckedAlpha(c, f.y);
    const double omega_bar = angular_deviation_rate(meas.yaw_rate, f, c, params.speed);
    const SpatialDerivative d = spatial_error_derivative(f, meas.slip, omega_bar,
                                                         params.speed, c, offset);
    const double psi_d = desired_psi(ie.e_I, d.aux);
    const double e_psi = WrapAngle(f.psi_tilde - psi_d);
    const double delta =
        steering_law(e_psi, f, meas.slip, c, k_psi, alpha, params.wheelbase);
    if (!std::isfinite(delta)) throw Error("non-finite steering command");
    out.delta = std::clamp(delta, -params.delta_max, params.delta_max);
    out.e_I = ie.e_I;
    out.psi_d = psi_d;
  } catch (const Error& e) {
    out.delta = previous_delta;
    out.held = true;
    out.fault = e.what();
  }
  return out;
}

}  // namespace

void BackstepGains::Validate() const {
  if (!(k_y > 0.0) || !(k_psi > 0.0)) {
    throw InvalidArgument("backstepping gains must be positive");
  }
}

void PredictiveGains::Validate() const {
  if (!(lambda > 0.0) || !(k_psi > 0.0)) {
    throw InvalidArgument("lambda and k_psi must be positive");
  }
  if (!(s_h > 0.0)) throw InvalidArgument("horizon length must be positive");
  if (n_h < 1) throw InvalidArgument("n_h must be at least 1");
}

PredictiveGains PredictiveGains::WithHorizon(double lambda, double k_psi,
                                             double s_h, double target_delta_s) {
  if (!(target_delta_s > 0.0)) throw InvalidArgument("delta_s must be positive");
  PredictiveGains g;
  g.lambda = lambda;
  g.k_psi = k_psi;
  g.s_h = s_h;
  g.n_h = std::max(1, static_cast<int>(std::lround(s_h / target_delta_s)));
  return g;
}

void ServoGains::Validate() const {
  if (!(k_d > 0.0) || !(k_p > 0.0)) {
    throw InvalidArgument("servoing gains must be positive");
  }
}

HorizonSums horizon_sums(double lambda, double delta_s, int n_h) {
  const double n = n_h;
  const double tri = n * (n + 1.0) / 2.0;
  HorizonSums out;
  out.sigma1 = delta_s * tri;
  out.sigma2 = delta_s * delta_s * n * (n + 1.0) * (2.0 * n + 1.0) / 6.0;
  out.sigma3 = delta_s * delta_s * delta_s * tri * tri;
  for (int k = 1; k <= n_h; ++k) {
    const double x = k * delta_s;
    out.sigma_e += x * std::exp(-lambda * x);
  }
  return out;
}

double angular_deviation_rate(double yaw_rate, const FrenetState& frenet,
                              double curvature, double speed) {
  const double alpha = CheckedAlpha(curvature, frenet.y);
  return yaw_rate - curvature * speed * std::cos(frenet.psi_tilde) / alpha;
}

SpatialDerivative spatial_error_derivative(const FrenetState& frenet,
                                           const SideslipState& slip,
                                           double omega_bar, double speed,
                                           double curvature,
                                           const ImplementOffset& offset) {
  CheckHeading(frenet.psi_tilde);
  if (!(speed > 0.0)) throw DegenerateSpeedError("speed must be positive");
  SpatialDerivative out;
  AuxTerms& aux = out.aux;
  aux.alpha = CheckedAlpha(curvature, frenet.y);
  aux.omega_bar = omega_bar;
  aux.gamma = omega_bar / speed;
  const double tan_psi = std::tan(frenet.psi_tilde);
  const double tan_br = std::tan(slip.beta_r);
  aux.A = aux.alpha * tan_br;
  aux.xi = aux.alpha * (1.0 - aux.gamma * offset.lateral) * tan_psi;
  out.e_I_prime =
      aux.alpha * (tan_psi + tan_br +
                   aux.gamma * (offset.longitudinal - offset.lateral * tan_psi));
  return out;
}

double backstepping_psi_d(double e_I, const AuxTerms& aux,
                          const BackstepGains& gains,
                          const ImplementOffset& offset) {
  const double denom = LeverArmDenominator(aux, offset);
  return std::atan((-gains.k_y * e_I - aux.A) / denom);
}

double steering_for_heading_rate(double psi_prime, const FrenetState& frenet,
                                 const SideslipState& slip, double curvature,
                                 double alpha, double wheelbase) {
  CheckHeading(frenet.psi_tilde);
  const double cos_br = std::cos(slip.beta_r);
  if (!(std::abs(cos_br) > kSingularityTolerance)) {
    throw SingularityError("cos(beta_R) = 0", SingularityError::Kind::kSideslip);
  }
  if (!(std::abs(alpha) > kSingularityTolerance)) {
    throw SingularityError("1 - c y = 0", SingularityError::Kind::kOsculatingCenter);
  }
  const double arg = (psi_prime + curvature) / (alpha * cos_br) * wheelbase *
                         std::cos(frenet.psi_tilde) +
                     std::tan(slip.beta_r);
  return std::atan(arg) - slip.beta_f;
}

double steering_law(double e_psi, const FrenetState& frenet,
                    const SideslipState& slip, double curvature, double k_psi,
                    double alpha, double wheelbase) {
  return steering_for_heading_rate(-k_psi * e_psi, frenet, slip, curvature, alpha,
                                   wheelbase);
}

double second_derivative_eI(const FrenetState& frenet, const SideslipState& slip,
                            double gamma, double alpha) {
  CheckHeading(frenet.psi_tilde);
  return alpha * alpha / std::cos(frenet.psi_tilde) *
         (1.0 - std::tan(frenet.psi_tilde) * std::tan(slip.beta_r)) * gamma;
}

PredictiveSolution predictive_psi_d(double e_I, const AuxTerms& aux,
                                    double e_I_pp, const PredictiveGains& gains,
                                    const ImplementOffset& offset) {
  gains.Validate();
  const double denom = LeverArmDenominator(aux, offset);
  PredictiveSolution out;
  out.sums = horizon_sums(gains.lambda, gains.delta_s(), gains.n_h);
  const HorizonSums& h = out.sums;
  out.xi = -(e_I * h.sigma1 + aux.A * h.sigma2 + e_I_pp * h.sigma3 -
             e_I * h.sigma_e) /
           h.sigma2;
  out.psi_d = std::atan(out.xi / denom);
  return out;
}

double skid_steer_command(double delta, double speed, double wheelbase) {
  return speed * std::tan(delta) / wheelbase;
}

ControlCommand predictive_control(const ControlMeasurement& meas,
                                  const PathModel& path,
                                  const PredictiveGains& gains,
                                  const ImplementOffset& offset,
                                  const VehicleParams& params,
                                  double previous_delta) {
  return RunBackstepStructure(
      meas, path, gains.k_psi, offset, params, previous_delta,
      [&](double e_I, const AuxTerms& aux) {
        const FrenetState& f = meas.frenet;
        // e_I'' uses the curvature at the end of the horizon; the rest of the
        // state stays frozen at the current abscissa.
        const double s_end = std::min(f.s + gains.s_h, path.total_length());
        const double c_end = curvature_at(path, s_end);
        const double gamma_end = meas.yaw_rate / params.speed -
                                 c_end * std::cos(f.psi_tilde) / aux.alpha;
        const double e_pp = second_derivative_eI(f, meas.slip, gamma_end, aux.alpha);
        return predictive_psi_d(e_I, aux, e_pp, gains, offset).psi_d;
      });
}

ControlCommand backstepping_control(const ControlMeasurement& meas,
                                    const PathModel& path,
                                    const BackstepGains& gains,
                                    const ImplementOffset& offset,
                                    const VehicleParams& params,
                                    double previous_delta) {
  return RunBackstepStructure(meas, path, gains.k_psi, offset, params,
                              previous_delta,
                              [&](double e_I, const AuxTerms& aux) {
                                return backstepping_psi_d(e_I, aux, gains, offset);
                              });
}

double servoing_target(const FrenetState& frenet, double curvature,
                       const ImplementOffset& offset) {
  const ImplementError ie = implement_error(frenet, curvature, offset);
  return -(offset.longitudinal * std::sin(frenet.psi_tilde) +
           offset.lateral * std::cos(frenet.psi_tilde) + ie.osculating);
}

ControlCommand lateral_servoing_control(const ControlMeasurement& meas,
                                        const PathModel& path,
                                        const ServoGains& gains,
                                        const ImplementOffset& offset,
                                        const VehicleParams& params,
                                        double previous_delta) {
  ControlCommand out;
  try {
    const FrenetState& f = meas.frenet;
    CheckHeading(f.psi_tilde);
    const double c = curvature_at(path, f.s);
    const double y_d = servoing_target(f, c, offset);
    const double alpha = CheckedAlpha(c, f.y);
    // Chained form in the Frenet frame: a2 = y - y_d, a3 = d(y)/ds.
    const double slope = std::tan(f.psi_tilde) + std::tan(meas.slip.beta_r);
    const double a3 = alpha * slope;
    const double m3 = -gains.k_d * a3 - gains.k_p * (f.y - y_d);
    const double cos_psi = std::cos(f.psi_tilde);
    const double psi_prime =
        (m3 + c * alpha * slope * slope) * cos_psi * cos_psi / alpha;
    const double delta = steering_for_heading_rate(psi_prime, f, meas.slip, c,
                                                   alpha, params.wheelbase);
    if (!std::isfinite(delta)) throw Error("non-finite steering command");
    out.delta = std::clamp(delta, -params.delta_max, params.delta_max);
    out.e_I = f.y - y_d;
    out.psi_d = 0.0;
  } catch (const Error& e) {
    out.delta = previous_delta;
    out.held = true;
    out.fault = e.what();
  }
  return out;
}

}  // namespace offset_track

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

#include <string>

#include "offset_track/path_geometry.hpp"
#include "offset_track/plant_sim.hpp"

namespace offset_track {

struct BackstepGains {
  double k_y = 0.15;   // 1/m, convergence of e_I
  double k_psi = 0.6;  // 1/m, convergence of the angular deviation

  void Validate() const;
};

// Closed-form predictive law parameters. The horizon [0, s_h] is sampled at
// n_h + 1 points spaced delta_s = s_h / n_h apart.
struct PredictiveGains {
  double lambda = 0.15;
  double k_psi = 0.6;
  double s_h = 1.0;
  int n_h = 10;

  double delta_s() const { return s_h / n_h; }
  void Validate() const;

  // n_h = max(1, round(s_h / target_delta_s)).
  static PredictiveGains WithHorizon(double lambda, double k_psi, double s_h,
                                     double target_delta_s = 0.1);
};

struct ServoGains {
  double k_d = 0.7;
  double k_p = 0.13;

  void Validate() const;
};

// sigma_p = sum_{k=1..n_h} (k ds)^p and sigma_e = sum k ds exp(-lambda k ds).
struct HorizonSums {
  double sigma1 = 0.0;
  double sigma2 = 0.0;
  double sigma3 = 0.0;
  double sigma_e = 0.0;
};

HorizonSums horizon_sums(double lambda, double delta_s, int n_h);

struct AuxTerms {
  double alpha = 1.0;      // 1 - c y
  double gamma = 0.0;      // omega_bar / v
  double omega_bar = 0.0;  // measured angular-deviation rate
  double xi = 0.0;         // alpha (1 - gamma I_y) tan(psi_tilde)
  double A = 0.0;          // alpha tan(beta_R)
  HorizonSums sums;        // filled by predictive_psi_d
};

struct SpatialDerivative {
  double e_I_prime = 0.0;
  AuxTerms aux;
};

// omega_bar = d(psi_tilde)/dt as measured; gamma = omega_bar / v.
double angular_deviation_rate(double yaw_rate, const FrenetState& frenet,
                              double curvature, double speed);

// e_I' = alpha [tan psi + tan beta_R + gamma (I_s - I_y tan psi)].
SpatialDerivative spatial_error_derivative(const FrenetState& frenet,
                                           const SideslipState& slip,
                                           double omega_bar, double speed,
                                           double curvature,
                                           const ImplementOffset& offset);

// Desired angular deviation from the first backstepping stage.
// The slip enters through aux.A = alpha tan(beta_R).
double backstepping_psi_d(double e_I, const AuxTerms& aux,
                          const BackstepGains& gains,
                          const ImplementOffset& offset);

// Steering angle giving d(psi_tilde)/ds = psi_prime, slip compensated.
double steering_for_heading_rate(double psi_prime, const FrenetState& frenet,
                                 const SideslipState& slip, double curvature,
                                 double alpha, double wheelbase);

// Second backstepping stage: e_psi' = -k_psi e_psi.
double steering_law(double e_psi, const FrenetState& frenet,
                    const SideslipState& slip, double curvature, double k_psi,
                    double alpha, double wheelbase);

// e_I'' = alpha^2 / cos(psi) (1 - tan(psi) tan(beta_R)) gamma. Callers pass
// the gamma evaluated with the curvature at the end of the horizon.
double second_derivative_eI(const FrenetState& frenet, const SideslipState& slip,
                            double gamma, double alpha);

struct PredictiveSolution {
  double psi_d = 0.0;
  double xi = 0.0;  // optimal xi_d^h
  HorizonSums sums;
};

// Minimizer of J = sum_k [e_I^k - h(k ds)]^2 in closed form.
PredictiveSolution predictive_psi_d(double e_I, const AuxTerms& aux,
                                    double e_I_pp, const PredictiveGains& gains,
                                    const ImplementOffset& offset);

// What the control pipeline reads from the sensors and the observer.
struct ControlMeasurement {
  FrenetState frenet;
  double yaw_rate = 0.0;  // IMU
  SideslipState slip;     // estimated sideslip
};

struct ControlCommand {
  double delta = 0.0;
  bool held = false;  // previous command reused after an error
  std::string fault;
  // Intermediate values, for logging.
  double e_I = 0.0;
  double psi_d = 0.0;
};

// delta_cmd = omega L / v inverse: omega = v tan(delta) / L.
double skid_steer_command(double delta, double speed, double wheelbase);

// Full pipelines. On a singularity/feasibility error, or a non-finite result,
// the previous command is held and the fault is reported.
ControlCommand predictive_control(const ControlMeasurement& meas,
                                  const PathModel& path,
                                  const PredictiveGains& gains,
                                  const ImplementOffset& offset,
                                  const VehicleParams& params,
                                  double previous_delta);

ControlCommand backstepping_control(const ControlMeasurement& meas,
                                    const PathModel& path,
                                    const BackstepGains& gains,
                                    const ImplementOffset& offset,
                                    const VehicleParams& params,
                                    double previous_delta);

ControlCommand lateral_servoing_control(const ControlMeasurement& meas,
                                        const PathModel& path,
                                        const ServoGains& gains,
                                        const ImplementOffset& offset,
                                        const VehicleParams& params,
                                        double previous_delta);

// y_d = -(I_s sin psi + I_y cos psi + e), the center error that puts I on the path.
double servoing_target(const FrenetState& frenet, double curvature,
                       const ImplementOffset& offset);

}  // namespace offset_track

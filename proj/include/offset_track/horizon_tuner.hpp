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

#include <iosfwd>
#include <string>
#include <vector>

#include "offset_track/benchmark.hpp"

namespace offset_track {

struct TuneSpec {
  double s_h_min = 0.5;  // m
  double s_h_max = 3.0;  // m
  double step = 0.01;    // m
  std::vector<PathModel> training_paths;  // all tagged kTraining
  double velocity = 1.0;
  ImplementOffset offset;
  double target_delta_s = 0.1;  // n_h = max(1, round(s_h / target_delta_s))
  bool mirror_balanced = false;

  void Validate() const;
  std::vector<double> Grid() const;
};

struct CurvePoint {
  double s_h = 0.0;
  double rmse = 0.0;
  bool failed = false;  // excluded from the argmin
};

struct TuneResult {
  double s_h_star = 0.0;
  double rmse_star = 0.0;
  std::vector<CurvePoint> curve;
  std::vector<std::string> warnings;
};

// Everything but the horizon is taken from `base`: plant, gains (lambda,
// k_psi), vehicle and sim options. Ties resolve toward the smaller s_h.
TuneResult tune(const TuneSpec& spec, const SweepBase& base);

// Widest interval of consecutive grid points around s_h_star whose RMSE stays
// within (1 + tolerance) of the minimum. Returns its length in meters.
double flat_interval_length(const TuneResult& result, double tolerance);

void write_curve_csv(const TuneResult& result, std::ostream& out);

}  // namespace offset_track

// Copyright 2026 The relaxopt Authors
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
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relaxopt/adjoint.hpp"
#include "relaxopt/core.hpp"
#include "relaxopt/problem.hpp"

namespace relaxopt {

/// J = dx/2 sum (u_T - u_d)^2.
double cost(std::span<const double> u_T, std::span<const double> u_d, double dx);

/// Forward solve from u0, then the tracking cost at T.
double reduced_cost(const ControlProblem& prob, std::span<const double> u0);

struct GradientEval {
  double cost = 0.0;
  Field grad;
  double a = 0.0;
  AdjointForm form_used = AdjointForm::ark;
};

/// Cost and exact gradient of the discrete reduced functional.
GradientEval cost_and_gradient(const ControlProblem& prob,
                               std::span<const double> u0,
                               AdjointForm form = AdjointForm::ark);

Field adjoint_gradient(const ControlProblem& prob, std::span<const double> u0,
                       AdjointForm form = AdjointForm::ark);

struct FdOptions {
  /// Component i is perturbed by theta * (1 + |u0_i|) instead of theta.
  bool relative = false;
  /// Hold the relaxation speed at its value for u0 in every perturbed
  /// solve, so the oracle differentiates the same map as the adjoint.
  bool freeze_speed = true;
  /// 0 picks the hardware concurrency.
  unsigned threads = 0;
};

/// Central differences of reduced_cost, one component at a time.
Field fd_gradient(const ControlProblem& prob, std::span<const double> u0,
                  double theta, const FdOptions& opts = {});

/// Central difference of reduced_cost along `dir`, speed frozen at u0.
double fd_directional(const ControlProblem& prob, std::span<const double> u0,
                      std::span<const double> dir, double theta);

/// ||a - b||_inf / ||b||_inf (absolute when b vanishes).
double max_rel_deviation(std::span<const double> a, std::span<const double> b);

enum class GradientMetric {
  /// Step along the L2 Riesz representative grad / dx.
  l2,
  /// Step along the raw coefficient gradient.
  euclidean,
};

GradientMetric parse_metric(const std::string& name);
std::string to_string(GradientMetric m);

struct OptimizerReport {
  std::size_t iterations = 0;
  double final_cost = 0.0;
  std::vector<double> cost_history;
  std::vector<double> grad_norm_history;
  std::vector<double> wall_time_history;
  double step_size = 0.0;
  bool converged = false;
  double wall_time = 0.0;
};

struct DescentOptions {
  double alpha = 0.1;
  double tol = 1e-2;
  std::size_t max_iter = 500;
  GradientMetric metric = GradientMetric::l2;
  AdjointForm form = AdjointForm::ark;
};

struct DescentResult {
  Field u0;
  OptimizerReport report;
};

/// u0 <- u0 - alpha grad until J < tol or max_iter updates were made.
DescentResult steepest_descent(const ControlProblem& prob,
                               std::span<const double> u0_start,
                               const DescentOptions& opts);

/// Columns iter, cost, grad_norm, wall_time_s.
void write_trace_csv(std::ostream& os, const OptimizerReport& report,
                     const std::string& header = {});

struct AlphaSweepRow {
  double alpha = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
  double final_cost = 0.0;
  bool diverged = false;
};

/// Runs the descent for each alpha; divergence is recorded, not thrown.
std::vector<AlphaSweepRow> calibrate_alpha(const ControlProblem& prob,
                                           std::span<const double> u0_start,
                                           std::span<const double> alphas,
                                           DescentOptions base);

}  // namespace relaxopt

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
#include "relaxopt/optimize.hpp"
#include "relaxopt/problem.hpp"
#include "relaxopt/spatial.hpp"
#include "relaxopt/tableau.hpp"

namespace relaxopt {

/// Gradient of the tracking cost with only every `stride`-th state kept in
/// memory; each segment is recomputed from its checkpoint on the way back.
GradientEval cost_and_gradient_checkpointed(const ControlProblem& prob,
                                            std::span<const double> u0,
                                            std::size_t stride,
                                            AdjointForm form = AdjointForm::ark);

/// Least-squares slope of log(err) against log(h).
double fit_slope(std::span<const double> h, std::span<const double> err);

struct OrderStudyConfig {
  std::size_t n_cells = 2048;
  double T = 0.5;
  std::size_t levels = 4;
  /// The reference run uses h_finest / 2^ref_extra.
  std::size_t ref_extra = 3;
  /// CFL number of the coarsest level.
  double c_cfl = 0.5;
  RelaxConfig relax;
  Scheme scheme = Scheme::upwind1;
  AdjointForm form = AdjointForm::ark;
  bool with_gradient = true;
  bool parallel = false;
};

struct OrderLevel {
  double h = 0.0;
  double err_forward = 0.0;
  double err_gradient = 0.0;
};

struct OrderStudyResult {
  std::string tableau;
  std::vector<OrderLevel> levels;  ///< decreasing h
  double h_ref = 0.0;
  double forward_order = 0.0;
  double gradient_order = 0.0;
  int target_order = 0;          ///< forward order from the checker
  int adjoint_target_order = 0;  ///< adjoint-system order from the checker
  bool inconclusive = false;
};

/// Self-convergence in h on Burgers with u0 = 1/2 + sin(x) and the fixed
/// target u_d = 1/2 + sin(x), on one fixed fine grid.
OrderStudyResult temporal_order_study(const ImexTableau& tab,
                                      const OrderStudyConfig& cfg);

/// Columns tableau, h, err_forward, err_gradient.
void write_order_csv(std::ostream& os, std::span<const OrderStudyResult> results,
                     const std::string& header = {});

struct TrackingConfig {
  std::vector<std::size_t> grid_sizes{100, 150, 200, 300};
  double T = 2.0;
  double c_cfl = 0.5;
  std::string tableau = "imex-euler";
  Scheme scheme = Scheme::upwind1;
  RelaxConfig relax;
  /// Hold a at the value for the data generating u_d, for every solve.
  bool fixed_speed = true;
  double start_value = 0.5;
  DescentOptions descent;
};

struct TrackingTableRow {
  std::size_t n_cells = 0;
  std::size_t iterations = 0;
  double wall_time_s = 0.0;
  double final_cost = 0.0;
  bool converged = false;
  bool diverged = false;
};

/// u_d from a forward solve of 1/2 + sin(x) on the given grid.
ControlProblem tracking_problem(const TrackingConfig& cfg, std::size_t n_cells);

std::vector<TrackingTableRow> tracking_table(const TrackingConfig& cfg);

/// Columns N, iterations, cpu_s, final_cost.
void write_tracking_csv(std::ostream& os, std::span<const TrackingTableRow> rows,
                        const std::string& header = {});

struct GradientReport {
  Field x;
  Field adjoint;
  Field fd;
  Field rel_err;
  double theta = 0.0;
  bool relative_theta = true;
  double max_rel_err = 0.0;   ///< ||adj - fd||_inf / ||fd||_inf
  double mean_rel_err = 0.0;  ///< mean of the per-component column
  double max_abs_err = 0.0;
  /// ||fd(theta) - fd(theta/2)||_inf * 4/3, the O(theta^2) error estimate.
  double richardson_estimate = 0.0;
};

/// Per component: rel_err = |adj - fd| / max(|fd|, 1e-3 ||fd||_inf); both
/// columns zero gives zero.
GradientReport gradient_report(const ControlProblem& prob,
                               std::span<const double> u0, double theta = 1e-6,
                               bool relative_theta = true);

/// Columns i, x, adjoint_grad, fd_grad, rel_err.
void write_gradient_report_csv(std::ostream& os, const GradientReport& rep,
                               const std::string& header = {});

}  // namespace relaxopt

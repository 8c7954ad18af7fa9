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

#include "relaxopt/core.hpp"
#include "relaxopt/problem.hpp"
#include "relaxopt/spatial.hpp"
#include "relaxopt/tableau.hpp"

namespace relaxopt {

struct StepResult {
  RelaxState next;
  std::vector<RelaxState> stages;
};

/// One IMEX step in stage-value form for y' = -D_x g(y) + r(y)/eps.
/// The u-part of every stage is explicit; the v-part solves its linear
/// relaxation relation in closed form. `step_index` only labels errors.
StepResult imex_step(const ImexTableau& tab, const SpatialOp& op,
                     const FluxModel& model, double eps, const RelaxState& y_n,
                     double h, std::size_t step_index = 0);

/// Same step through the slope form: transport slopes K~ and relaxation
/// slopes K are the unknowns.
RelaxState imex_step_kform(const ImexTableau& tab, const SpatialOp& op,
                           const FluxModel& model, double eps,
                           const RelaxState& y_n, double h,
                           std::size_t step_index = 0);

struct Trajectory {
  std::vector<double> times;
  std::vector<RelaxState> steps;
  /// stages[n][i] is stage i of step n; empty when not stored.
  std::vector<std::vector<RelaxState>> stages;
  double h = 0.0;
  std::string tableau;
  double a = 0.0;
  double epsilon = 0.0;

  std::size_t n_steps() const { return times.empty() ? 0 : times.size() - 1; }
  bool has_stages() const { return !stages.empty(); }
  const RelaxState& terminal() const { return steps.back(); }
};

SpatialOp spatial_op_for(const ControlProblem& prob, double a);

/// Integrates from (u0, f(u0)) to T with the problem's tableau.
Trajectory solve_forward(const ControlProblem& prob, std::span<const double> u0,
                         bool store_stages = true);
Trajectory solve_forward(const ControlProblem& prob, const ImexTableau& tab,
                         std::span<const double> u0, bool store_stages = true);

/// Same integration keeping only the terminal state.
RelaxState integrate(const ControlProblem& prob, std::span<const double> u0);

/// Stage states of step n, recomputed when the trajectory did not keep them.
std::vector<RelaxState> stages_of(const Trajectory& traj,
                                  const ControlProblem& prob,
                                  const ImexTableau& tab, std::size_t n);

/// Columns t, x, u, v; one row per cell for every `stride`-th step and the
/// final one. `header` (if non-empty) is written first as a '#' line.
void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const Grid& grid, std::size_t stride,
                          const std::string& header = {});

}  // namespace relaxopt

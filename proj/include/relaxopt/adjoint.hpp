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

// Discrete adjoint of the IMEX forward scheme. For each step the stage
// costates are solved backwards through the stages; the stiff relaxation
// coupling is linear in q and eliminated in closed form, as in the forward
// step. Three algebraically equivalent forms are provided:
//   ark   weight-normalised stage costates P~, P (needs nonzero weights)
//   xi    unnormalised stage costates xi~, xi (any tableau)
//   zeta  per-stage increments zeta with p_n = p_{n+1} + sum zeta

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "relaxopt/core.hpp"
#include "relaxopt/forward.hpp"
#include "relaxopt/problem.hpp"
#include "relaxopt/spatial.hpp"
#include "relaxopt/tableau.hpp"

namespace relaxopt {

enum class AdjointForm { ark, xi, zeta };

AdjointForm parse_adjoint_form(const std::string& name);
std::string to_string(AdjointForm form);

/// Gradient of J = dx/2 sum (u_T - u_d)^2 with respect to y_N: p = dx (u_T -
/// u_d), q = 0.
Costate terminal_costate(std::span<const double> u_T,
                         std::span<const double> u_d, double dx);

struct AdjointStepResult {
  Costate p_n;
  /// ark: P~ / xi: xi~ / zeta: empty.
  std::vector<Costate> stage_tilde;
  /// ark: P / xi: xi / zeta: zeta.
  std::vector<Costate> stage;
};

/// `stages` are the forward stage states of the step being reversed.
AdjointStepResult adjoint_step_ark(const AdjointCoeffs& coeffs,
                                   const ImexTableau& tab, const SpatialOp& op,
                                   const FluxModel& model, double eps,
                                   std::span<const RelaxState> stages,
                                   const Costate& p_next, double h,
                                   std::size_t step_index = 0);

AdjointStepResult adjoint_step_xi(const ImexTableau& tab, const SpatialOp& op,
                                  const FluxModel& model, double eps,
                                  std::span<const RelaxState> stages,
                                  const Costate& p_next, double h,
                                  std::size_t step_index = 0);

AdjointStepResult adjoint_step_zeta(const ImexTableau& tab,
                                    const SpatialOp& op,
                                    const FluxModel& model, double eps,
                                    std::span<const RelaxState> stages,
                                    const Costate& p_next, double h,
                                    std::size_t step_index = 0);

struct AdjointSweepRecord {
  /// costates[n] pairs with trajectory step n; costates.back() is terminal.
  std::vector<Costate> costates;
  /// Per-step stage costates; empty unless requested.
  std::vector<std::vector<Costate>> stage_tilde;
  std::vector<std::vector<Costate>> stage;
  AdjointForm form_requested = AdjointForm::ark;
  AdjointForm form_used = AdjointForm::ark;

  const Costate& initial() const { return costates.front(); }
};

struct AdjointOptions {
  AdjointForm form = AdjointForm::ark;
  bool keep_stage_costates = false;
};

/// Backward sweep from an arbitrary terminal costate. The ark form falls
/// back to xi when the tableau has a zero weight.
AdjointSweepRecord sweep_adjoint(const Trajectory& traj,
                                 const ControlProblem& prob,
                                 const ImexTableau& tab,
                                 const Costate& terminal,
                                 const AdjointOptions& opts = {});

/// Sweep for the tracking functional of `prob` (terminal costate from u_d).
AdjointSweepRecord solve_adjoint(const Trajectory& traj,
                                 const ControlProblem& prob,
                                 const AdjointOptions& opts = {});
AdjointSweepRecord solve_adjoint(const Trajectory& traj,
                                 const ControlProblem& prob,
                                 const ImexTableau& tab,
                                 const AdjointOptions& opts = {});

/// grad_i = p0_i + f'(u0_i) q0_i, the chain rule through v0 = f(u0).
Field assemble_gradient(const AdjointSweepRecord& record,
                        std::span<const double> u0, const FluxModel& model);

/// Columns i, x, u0, grad.
void write_gradient_csv(std::ostream& os, const Grid& grid,
                        std::span<const double> u0,
                        std::span<const double> grad,
                        const std::string& header = {});

}  // namespace relaxopt

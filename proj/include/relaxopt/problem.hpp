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
#include <optional>
#include <span>
#include <vector>

#include "relaxopt/core.hpp"
#include "relaxopt/spatial.hpp"
#include "relaxopt/tableau.hpp"

namespace relaxopt {

/// Tracking problem: choose u0 so the relaxed solution at T matches u_d.
struct ControlProblem {
  Grid grid;
  FluxModel model;
  RelaxConfig relax;
  double T = 1.0;
  Field u_d;
  ImexTableau tableau;
  double c_cfl = 0.5;
  Scheme scheme = Scheme::upwind1;
};

/// Throws InputError on violated invariants (T > 0, sizes, c_cfl > 0).
void validate(const ControlProblem& prob);

/// Relaxation speed for a forward solve started from u0: the fixed
/// override if given, else the subcharacteristic estimate of u0.
double speed_for(const ControlProblem& prob, std::span<const double> u0);

/// Uniform steps of c_cfl dx / a with the last one shortened to hit T.
struct StepPlan {
  double h = 0.0;
  std::size_t n_steps = 0;
  std::vector<double> times;  ///< t_0 = 0, ..., t_N = T

  double step(std::size_t n) const { return times[n + 1] - times[n]; }
};

StepPlan plan_steps(double T, double h_nominal);
StepPlan plan_steps(const ControlProblem& prob, double a);

/// The experiment used throughout: Burgers on [0, 2 pi), u_d the state at T
/// reached from 1/2 + sin(x) with the same grid and tableau.
ControlProblem burgers_tracking_problem(std::size_t n_cells, double T,
                                        const ImexTableau& tab,
                                        const RelaxConfig& relax = {},
                                        double c_cfl = 0.5,
                                        Scheme scheme = Scheme::upwind1);

/// 1/2 + sin(x) at the cell centres.
Field sine_profile(const Grid& grid);

}  // namespace relaxopt

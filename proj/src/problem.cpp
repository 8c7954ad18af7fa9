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

#include "relaxopt/problem.hpp"

#include <cmath>
#include <numbers>

#include "relaxopt/error.hpp"
#include "relaxopt/forward.hpp"

namespace relaxopt {

void validate(const ControlProblem& prob) {
  validate(prob.relax);
  if (!(prob.T > 0.0) || !std::isfinite(prob.T)) {
    throw InputError("T must be positive and finite");
  }
  if (!(prob.c_cfl > 0.0) || !std::isfinite(prob.c_cfl)) {
    throw InputError("c_cfl must be positive");
  }
  if (prob.grid.n_cells < 2) throw InputError("grid needs at least 2 cells");
  if (prob.u_d.size() != prob.grid.n_cells) {
    throw InputError("u_d has " + std::to_string(prob.u_d.size()) +
                     " entries, grid has " + std::to_string(prob.grid.n_cells));
  }
  if (prob.tableau.s == 0) throw InputError("tableau has no stages");
  if (!prob.model.flux || !prob.model.flux_deriv) {
    throw InputError("flux model is incomplete");
  }
}

double speed_for(const ControlProblem& prob, std::span<const double> u0) {
  if (prob.relax.speed) return *prob.relax.speed;
  return subchar_speed(prob.model, u0, prob.relax);
}

StepPlan plan_steps(double T, double h_nominal) {
  if (!(T > 0.0) || !(h_nominal > 0.0)) {
    throw InputError("plan_steps: T and h must be positive");
  }
  StepPlan plan;
  plan.h = h_nominal;
  // Tolerate round-off so T = k h does not produce a sliver step.
  const double ratio = T / h_nominal;
  auto n = static_cast<std::size_t>(std::floor(ratio));
  if (ratio - static_cast<double>(n) > 1e-9) ++n;
  if (n == 0) n = 1;
  plan.n_steps = n;
  plan.times.resize(n + 1);
  for (std::size_t k = 0; k < n; ++k) plan.times[k] = static_cast<double>(k) * h_nominal;
  plan.times[n] = T;
  return plan;
}

StepPlan plan_steps(const ControlProblem& prob, double a) {
  return plan_steps(prob.T, prob.c_cfl * prob.grid.dx / a);
}

Field sine_profile(const Grid& grid) {
  Field u(grid.n_cells);
  for (std::size_t i = 0; i < grid.n_cells; ++i) u[i] = 0.5 + std::sin(grid.centers[i]);
  return u;
}

ControlProblem burgers_tracking_problem(std::size_t n_cells, double T,
                                        const ImexTableau& tab,
                                        const RelaxConfig& relax, double c_cfl,
                                        Scheme scheme) {
  ControlProblem prob;
  prob.grid = make_grid(0.0, 2.0 * std::numbers::pi, n_cells);
  prob.model = burgers_model();
  prob.relax = relax;
  prob.T = T;
  prob.tableau = tab;
  prob.c_cfl = c_cfl;
  prob.scheme = scheme;
  prob.u_d.assign(n_cells, 0.0);
  prob.u_d = integrate(prob, sine_profile(prob.grid)).u;
  return prob;
}

}  // namespace relaxopt

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

#include "relaxopt/forward.hpp"

#include <cmath>
#include <ostream>

#include "relaxopt/error.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt {

namespace {

void check_finite(const RelaxState& y, std::size_t step, std::size_t stage) {
  if (!all_finite(y.u)) throw DivergenceError(step, stage, "non-finite u");
  if (!all_finite(y.v)) throw DivergenceError(step, stage, "non-finite v");
}

void check_step_args(const ImexTableau& tab, const SpatialOp& op,
                     const RelaxState& y_n, double h, double eps) {
  if (!(h > 0.0) || !std::isfinite(h)) throw InputError("step size must be positive");
  if (!(eps > 0.0)) throw InputError("epsilon must be positive");
  if (tab.s == 0) throw InputError("tableau has no stages");
  require_size(y_n, op.grid.n_cells, "imex_step");
}

}  // namespace

StepResult imex_step(const ImexTableau& tab, const SpatialOp& op,
                     const FluxModel& model, double eps, const RelaxState& y_n,
                     double h, std::size_t step_index) {
  check_step_args(tab, op, y_n, h, eps);
  const auto& kt = kernels::active();
  const std::size_t n = y_n.size();
  const std::size_t s = tab.s;

  StepResult res;
  res.stages.assign(s, RelaxState(n));
  std::vector<RelaxState> transport(s);  // D_x g(Y_i)
  std::vector<Field> source(s);          // r(Y_i) / eps, v-component
  Field rhs(n), fu(n);

  for (std::size_t i = 0; i < s; ++i) {
    RelaxState& Y = res.stages[i];
    Y.u = y_n.u;
    rhs = y_n.v;
    for (std::size_t j = 0; j < i; ++j) {
      const double at = tab.a_tilde(i, j);
      if (at != 0.0) {
        kt.axpy(-h * at, transport[j].u, Y.u);
        kt.axpy(-h * at, transport[j].v, rhs);
      }
      const double ai = tab.a_impl(i, j);
      if (ai != 0.0) kt.axpy(h * ai, source[j], rhs);
    }
    for (std::size_t k = 0; k < n; ++k) fu[k] = model.flux(Y.u[k]);
    const double aii = tab.a_impl(i, i);
    const double kappa = h * aii / eps;
    kt.relax_solve(rhs, fu, kappa, Y.v);
    check_finite(Y, step_index, i);

    // Recover the source from the solved relation rather than from
    // (f(U) - V)/eps, which cancels catastrophically for small eps.
    source[i].resize(n);
    if (aii != 0.0) {
      const double inv = 1.0 / (h * aii);
      for (std::size_t k = 0; k < n; ++k) source[i][k] = (Y.v[k] - rhs[k]) * inv;
    } else {
      for (std::size_t k = 0; k < n; ++k) source[i][k] = (fu[k] - Y.v[k]) / eps;
    }
    apply_dx(op, Y, transport[i]);
  }

  res.next = y_n;
  for (std::size_t i = 0; i < s; ++i) {
    if (tab.w_tilde[i] != 0.0) {
      kt.axpy(-h * tab.w_tilde[i], transport[i].u, res.next.u);
      kt.axpy(-h * tab.w_tilde[i], transport[i].v, res.next.v);
    }
    if (tab.w[i] != 0.0) kt.axpy(h * tab.w[i], source[i], res.next.v);
  }
  check_finite(res.next, step_index, s);
  return res;
}

RelaxState imex_step_kform(const ImexTableau& tab, const SpatialOp& op,
                           const FluxModel& model, double eps,
                           const RelaxState& y_n, double h,
                           std::size_t step_index) {
  check_step_args(tab, op, y_n, h, eps);
  const std::size_t n = y_n.size();
  const std::size_t s = tab.s;

  // K~_i = -D_x g(Y_i), K_i = r(Y_i)/eps with Y_i = y_n + h sum(a~ K~ + a K).
  std::vector<RelaxState> kt_slopes(s);
  std::vector<Field> k_slopes(s, Field(n, 0.0));
  RelaxState Y(n);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      double u = y_n.u[k];
      double v = y_n.v[k];
      for (std::size_t j = 0; j < i; ++j) {
        u += h * tab.a_tilde(i, j) * kt_slopes[j].u[k];
        v += h * tab.a_tilde(i, j) * kt_slopes[j].v[k] +
             h * tab.a_impl(i, j) * k_slopes[j][k];
      }
      // K_i = (f(u) - v - h a_ii K_i) / eps, linear in K_i.
      const double d = h * tab.a_impl(i, i);
      const double ki = (model.flux(u) - v) / (eps + d);
      k_slopes[i][k] = ki;
      Y.u[k] = u;
      Y.v[k] = v + d * ki;
    }
    check_finite(Y, step_index, i);
    RelaxState dg;
    apply_dx(op, Y, dg);
    kt_slopes[i].u.resize(n);
    kt_slopes[i].v.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      kt_slopes[i].u[k] = -dg.u[k];
      kt_slopes[i].v[k] = -dg.v[k];
    }
  }
  RelaxState next = y_n;
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < s; ++i) {
      next.u[k] += h * tab.w_tilde[i] * kt_slopes[i].u[k];
      next.v[k] += h * (tab.w_tilde[i] * kt_slopes[i].v[k] + tab.w[i] * k_slopes[i][k]);
    }
  }
  check_finite(next, step_index, s);
  return next;
}

SpatialOp spatial_op_for(const ControlProblem& prob, double a) {
  SpatialOp op;
  op.grid = prob.grid;
  op.a = a;
  op.scheme = prob.scheme;
  return op;
}

namespace {

template <typename OnStep>
void run_forward(const ControlProblem& prob, const ImexTableau& tab,
                 std::span<const double> u0, double a, OnStep&& on_step) {
  if (u0.size() != prob.grid.n_cells) {
    throw InputError("u0 has " + std::to_string(u0.size()) + " entries, grid has " +
                     std::to_string(prob.grid.n_cells));
  }
  if (!all_finite(u0)) throw InputError("u0 has non-finite entries");
  const SpatialOp op = spatial_op_for(prob, a);
  const StepPlan plan = plan_steps(prob, a);
  RelaxState y = relax_init(u0, prob.model);
  for (std::size_t k = 0; k < plan.n_steps; ++k) {
    StepResult r = imex_step(tab, op, prob.model, prob.relax.epsilon, y,
                             plan.step(k), k);
    on_step(k, plan, std::move(r));
    y = std::move(r.next);
  }
}

}  // namespace

Trajectory solve_forward(const ControlProblem& prob, const ImexTableau& tab,
                         std::span<const double> u0, bool store_stages) {
  validate(prob);
  const double a = speed_for(prob, u0);
  Trajectory traj;
  traj.a = a;
  traj.epsilon = prob.relax.epsilon;
  traj.tableau = tab.name;
  const StepPlan plan = plan_steps(prob, a);
  traj.h = plan.h;
  traj.times = plan.times;
  traj.steps.reserve(plan.n_steps + 1);
  traj.steps.push_back(relax_init(u0, prob.model));
  if (store_stages) traj.stages.reserve(plan.n_steps);
  run_forward(prob, tab, u0, a, [&](std::size_t, const StepPlan&, StepResult&& r) {
    traj.steps.push_back(r.next);
    if (store_stages) traj.stages.push_back(std::move(r.stages));
  });
  return traj;
}

Trajectory solve_forward(const ControlProblem& prob, std::span<const double> u0,
                         bool store_stages) {
  return solve_forward(prob, prob.tableau, u0, store_stages);
}

RelaxState integrate(const ControlProblem& prob, std::span<const double> u0) {
  validate(prob);
  const double a = speed_for(prob, u0);
  RelaxState last;
  run_forward(prob, prob.tableau, u0, a,
              [&](std::size_t k, const StepPlan& plan, StepResult&& r) {
                if (k + 1 == plan.n_steps) last = r.next;
              });
  return last;
}

std::vector<RelaxState> stages_of(const Trajectory& traj,
                                  const ControlProblem& prob,
                                  const ImexTableau& tab, std::size_t n) {
  if (n >= traj.n_steps()) throw InputError("stages_of: step index out of range");
  if (traj.has_stages()) return traj.stages[n];
  const SpatialOp op = spatial_op_for(prob, traj.a);
  return imex_step(tab, op, prob.model, traj.epsilon, traj.steps[n],
                   traj.times[n + 1] - traj.times[n], n)
      .stages;
}

void write_trajectory_csv(std::ostream& os, const Trajectory& traj,
                          const Grid& grid, std::size_t stride,
                          const std::string& header) {
  if (stride == 0) throw InputError("frame stride must be positive");
  if (!header.empty()) os << "# " << header << '\n';
  os << "t,x,u,v\n";
  os.precision(17);
  const std::size_t last = traj.steps.size() - 1;
  for (std::size_t k = 0; k <= last; ++k) {
    if (k % stride != 0 && k != last) continue;
    const RelaxState& y = traj.steps[k];
    for (std::size_t i = 0; i < y.size(); ++i) {
      os << traj.times[k] << ',' << grid.centers[i] << ',' << y.u[i] << ','
         << y.v[i] << '\n';
    }
  }
}

}  // namespace relaxopt

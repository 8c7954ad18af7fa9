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

#include "relaxopt/optimize.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <ostream>
#include <thread>

#include "relaxopt/error.hpp"
#include "relaxopt/forward.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt {

double cost(std::span<const double> u_T, std::span<const double> u_d, double dx) {
  if (u_T.size() != u_d.size()) throw InputError("cost: u_T and u_d differ in length");
  return 0.5 * dx * kernels::active().sq_dist(u_T, u_d);
}

double reduced_cost(const ControlProblem& prob, std::span<const double> u0) {
  const RelaxState yT = integrate(prob, u0);
  return cost(yT.u, prob.u_d, prob.grid.dx);
}

GradientEval cost_and_gradient(const ControlProblem& prob,
                               std::span<const double> u0, AdjointForm form) {
  const Trajectory traj = solve_forward(prob, u0, true);
  const AdjointSweepRecord rec = solve_adjoint(traj, prob, AdjointOptions{form, false});
  GradientEval out;
  out.cost = cost(traj.terminal().u, prob.u_d, prob.grid.dx);
  out.grad = assemble_gradient(rec, u0, prob.model);
  out.a = traj.a;
  out.form_used = rec.form_used;
  return out;
}

Field adjoint_gradient(const ControlProblem& prob, std::span<const double> u0,
                       AdjointForm form) {
  return cost_and_gradient(prob, u0, form).grad;
}

Field fd_gradient(const ControlProblem& prob, std::span<const double> u0,
                  double theta, const FdOptions& opts) {
  if (!(theta > 0.0)) throw InputError("fd_gradient: theta must be positive");
  validate(prob);
  if (u0.size() != prob.grid.n_cells) throw InputError("fd_gradient: u0 size mismatch");
  ControlProblem p = prob;
  if (opts.freeze_speed) p.relax.speed = speed_for(prob, u0);

  const std::size_t n = u0.size();
  Field grad(n, 0.0);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto worker = [&] {
    Field u(u0.begin(), u0.end());
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        const double th = opts.relative ? theta * (1.0 + std::abs(u0[i])) : theta;
        u[i] = u0[i] + th;
        const double jp = reduced_cost(p, u);
        u[i] = u0[i] - th;
        const double jm = reduced_cost(p, u);
        u[i] = u0[i];
        grad[i] = (jp - jm) / (2.0 * th);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mu);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  unsigned threads = opts.threads ? opts.threads : std::thread::hardware_concurrency();
  threads = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(std::max<std::size_t>(n, 1)));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);
  return grad;
}

double fd_directional(const ControlProblem& prob, std::span<const double> u0,
                      std::span<const double> dir, double theta) {
  if (!(theta > 0.0)) throw InputError("fd_directional: theta must be positive");
  if (dir.size() != u0.size()) throw InputError("fd_directional: size mismatch");
  ControlProblem p = prob;
  p.relax.speed = speed_for(prob, u0);
  Field up(u0.begin(), u0.end());
  Field um(u0.begin(), u0.end());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    up[i] += theta * dir[i];
    um[i] -= theta * dir[i];
  }
  return (reduced_cost(p, up) - reduced_cost(p, um)) / (2.0 * theta);
}

double max_rel_deviation(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("max_rel_deviation: size mismatch");
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    diff = std::max(diff, std::abs(a[i] - b[i]));
    scale = std::max(scale, std::abs(b[i]));
  }
  return scale > 0.0 ? diff / scale : diff;
}

GradientMetric parse_metric(const std::string& name) {
  if (name == "l2") return GradientMetric::l2;
  if (name == "euclidean") return GradientMetric::euclidean;
  throw InputError("unknown gradient metric '" + name + "' (known: l2, euclidean)");
}

std::string to_string(GradientMetric m) {
  return m == GradientMetric::l2 ? "l2" : "euclidean";
}

DescentResult steepest_descent(const ControlProblem& prob,
                               std::span<const double> u0_start,
                               const DescentOptions& opts) {
  if (!(opts.alpha > 0.0 && opts.alpha < 1.0)) {
    throw InputError("alpha must lie in (0, 1)");
  }
  if (!(opts.tol > 0.0)) throw InputError("tol must be positive");
  validate(prob);
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  DescentResult res;
  res.u0.assign(u0_start.begin(), u0_start.end());
  OptimizerReport& rep = res.report;
  rep.step_size = opts.alpha;
  const double dx = prob.grid.dx;
  const double scale = opts.metric == GradientMetric::l2 ? 1.0 / dx : 1.0;

  for (std::size_t it = 0;; ++it) {
    const GradientEval ge = cost_and_gradient(prob, res.u0, opts.form);
    if (!std::isfinite(ge.cost)) throw DivergenceError(it, 0, "non-finite cost");
    double sq = 0.0;
    for (double g : ge.grad) sq += g * g;
    rep.cost_history.push_back(ge.cost);
    rep.grad_norm_history.push_back(std::sqrt(sq / dx));
    rep.wall_time_history.push_back(elapsed());
    rep.final_cost = ge.cost;
    rep.iterations = it;
    if (ge.cost < opts.tol) {
      rep.converged = true;
      break;
    }
    if (it >= opts.max_iter) break;
    kernels::active().axpy(-opts.alpha * scale, ge.grad, res.u0);
  }
  rep.wall_time = elapsed();
  return res;
}

void write_trace_csv(std::ostream& os, const OptimizerReport& report,
                     const std::string& header) {
  if (!header.empty()) os << "# " << header << '\n';
  os << "iter,cost,grad_norm,wall_time_s\n";
  os.precision(17);
  for (std::size_t k = 0; k < report.cost_history.size(); ++k) {
    os << k << ',' << report.cost_history[k] << ',' << report.grad_norm_history[k]
       << ',' << report.wall_time_history[k] << '\n';
  }
}

std::vector<AlphaSweepRow> calibrate_alpha(const ControlProblem& prob,
                                           std::span<const double> u0_start,
                                           std::span<const double> alphas,
                                           DescentOptions base) {
  std::vector<AlphaSweepRow> rows;
  for (double alpha : alphas) {
    AlphaSweepRow row;
    row.alpha = alpha;
    base.alpha = alpha;
    try {
      const DescentResult r = steepest_descent(prob, u0_start, base);
      row.iterations = r.report.iterations;
      row.converged = r.report.converged;
      row.final_cost = r.report.final_cost;
    } catch (const DivergenceError&) {
      row.diverged = true;
      row.final_cost = std::numeric_limits<double>::infinity();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace relaxopt

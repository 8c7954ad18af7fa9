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

#include "relaxopt/studies.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>

#include "relaxopt/error.hpp"
#include "relaxopt/forward.hpp"

namespace relaxopt {

GradientEval cost_and_gradient_checkpointed(const ControlProblem& prob,
                                            std::span<const double> u0,
                                            std::size_t stride,
                                            AdjointForm form) {
  validate(prob);
  if (stride == 0) throw InputError("checkpoint stride must be positive");
  if (u0.size() != prob.grid.n_cells) throw InputError("u0 size mismatch");
  const double a = speed_for(prob, u0);
  const StepPlan plan = plan_steps(prob, a);
  const SpatialOp op = spatial_op_for(prob, a);
  const double eps = prob.relax.epsilon;
  const ImexTableau& tab = prob.tableau;

  std::vector<RelaxState> checkpoints;
  RelaxState y = relax_init(u0, prob.model);
  for (std::size_t k = 0; k < plan.n_steps; ++k) {
    if (k % stride == 0) checkpoints.push_back(y);
    y = imex_step(tab, op, prob.model, eps, y, plan.step(k), k).next;
  }

  GradientEval out;
  out.cost = cost(y.u, prob.u_d, prob.grid.dx);
  out.a = a;
  Costate p = terminal_costate(y.u, prob.u_d, prob.grid.dx);
  for (std::size_t c = checkpoints.size(); c-- > 0;) {
    const std::size_t k0 = c * stride;
    const std::size_t k1 = std::min(k0 + stride, plan.n_steps);
    Trajectory seg;
    seg.a = a;
    seg.epsilon = eps;
    seg.tableau = tab.name;
    seg.h = plan.h;
    seg.times.assign(plan.times.begin() + static_cast<std::ptrdiff_t>(k0),
                     plan.times.begin() + static_cast<std::ptrdiff_t>(k1) + 1);
    seg.steps.push_back(checkpoints[c]);
    for (std::size_t k = k0; k + 1 < k1; ++k) {
      seg.steps.push_back(
          imex_step(tab, op, prob.model, eps, seg.steps.back(), plan.step(k), k).next);
    }
    const AdjointSweepRecord rec = sweep_adjoint(seg, prob, tab, p, {form, false});
    out.form_used = rec.form_used;
    p = rec.costates.front();
  }
  AdjointSweepRecord head;
  head.costates.push_back(std::move(p));
  out.grad = assemble_gradient(head, u0, prob.model);
  return out;
}

double fit_slope(std::span<const double> h, std::span<const double> err) {
  if (h.size() != err.size() || h.size() < 2) {
    throw InputError("fit_slope: need at least two matching points");
  }
  const auto n = static_cast<double>(h.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    if (!(h[i] > 0.0 && err[i] > 0.0) || !std::isfinite(err[i])) {
      throw InputError("fit_slope: step sizes and errors must be positive");
    }
    const double x = std::log(h[i]);
    const double y = std::log(err[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

namespace {

struct LevelRun {
  Field u_T;
  Field grad;
};

LevelRun run_level(const ControlProblem& base, std::span<const double> u0,
                   double a, double h, bool with_gradient, AdjointForm form) {
  ControlProblem prob = base;
  prob.c_cfl = h * a / prob.grid.dx;
  LevelRun r;
  const auto n_steps = static_cast<std::size_t>(std::llround(prob.T / h));
  if (with_gradient) {
    const auto stride = static_cast<std::size_t>(
        std::max(1.0, std::ceil(std::sqrt(static_cast<double>(n_steps)))));
    r.grad = cost_and_gradient_checkpointed(prob, u0, stride, form).grad;
  }
  r.u_T = integrate(prob, u0).u;
  return r;
}

double max_diff(const Field& a, const Field& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

OrderStudyResult temporal_order_study(const ImexTableau& tab,
                                      const OrderStudyConfig& cfg) {
  if (cfg.levels < 3) throw InputError("order study needs at least 3 levels");
  if (!(cfg.T > 0.0)) throw InputError("order study needs T > 0");
  ControlProblem prob;
  prob.grid = make_grid(0.0, 2.0 * std::numbers::pi, cfg.n_cells);
  prob.model = burgers_model();
  prob.relax = cfg.relax;
  prob.T = cfg.T;
  prob.tableau = tab;
  prob.scheme = cfg.scheme;
  prob.c_cfl = cfg.c_cfl;
  const Field u0 = sine_profile(prob.grid);
  prob.u_d = u0;
  validate(prob);
  const double a = speed_for(prob, u0);
  prob.relax.speed = a;

  // Step counts n0 2^l so every level lands on T with uniform steps.
  const auto n0 = static_cast<std::size_t>(
      std::ceil(cfg.T / (cfg.c_cfl * prob.grid.dx / a) - 1e-9));
  std::vector<double> hs;
  for (std::size_t l = 0; l < cfg.levels; ++l) {
    hs.push_back(cfg.T / static_cast<double>(n0 << l));
  }
  const double h_ref = cfg.T / static_cast<double>(n0 << (cfg.levels - 1 + cfg.ref_extra));

  std::vector<LevelRun> runs(cfg.levels);
  LevelRun ref;
  if (cfg.parallel) {
    std::vector<std::future<LevelRun>> futs;
    for (double h : hs) {
      futs.push_back(std::async(std::launch::async, run_level, std::cref(prob),
                                std::span<const double>(u0), a, h,
                                cfg.with_gradient, cfg.form));
    }
    ref = run_level(prob, u0, a, h_ref, cfg.with_gradient, cfg.form);
    for (std::size_t l = 0; l < futs.size(); ++l) runs[l] = futs[l].get();
  } else {
    for (std::size_t l = 0; l < hs.size(); ++l) {
      runs[l] = run_level(prob, u0, a, hs[l], cfg.with_gradient, cfg.form);
    }
    ref = run_level(prob, u0, a, h_ref, cfg.with_gradient, cfg.form);
  }

  OrderStudyResult res;
  res.tableau = tab.name;
  res.h_ref = h_ref;
  const OrderReport order = check_order(tab);
  res.target_order = order.forward_order;
  res.adjoint_target_order = order.adjoint_system_order;
  std::vector<double> ef, eg;
  for (std::size_t l = 0; l < hs.size(); ++l) {
    OrderLevel lv;
    lv.h = hs[l];
    lv.err_forward = max_diff(runs[l].u_T, ref.u_T);
    if (cfg.with_gradient) lv.err_gradient = max_diff(runs[l].grad, ref.grad);
    res.levels.push_back(lv);
    ef.push_back(lv.err_forward);
    eg.push_back(lv.err_gradient);
  }
  auto monotone = [](const std::vector<double>& e) {
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (!(e[i] > 0.0) || !std::isfinite(e[i])) return false;
      if (i > 0 && !(e[i] < e[i - 1])) return false;
    }
    return true;
  };
  res.inconclusive = !monotone(ef) || (cfg.with_gradient && !monotone(eg));
  auto slope_or_nan = [&](const std::vector<double>& e) {
    for (double v : e) {
      if (!(v > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    }
    return fit_slope(hs, e);
  };
  res.forward_order = slope_or_nan(ef);
  res.gradient_order =
      cfg.with_gradient ? slope_or_nan(eg) : std::numeric_limits<double>::quiet_NaN();
  return res;
}

void write_order_csv(std::ostream& os, std::span<const OrderStudyResult> results,
                     const std::string& header) {
  if (!header.empty()) os << "# " << header << '\n';
  os << "tableau,h,err_forward,err_gradient\n";
  os.precision(17);
  for (const auto& r : results) {
    for (const auto& lv : r.levels) {
      os << r.tableau << ',' << lv.h << ',' << lv.err_forward << ','
         << lv.err_gradient << '\n';
    }
  }
}

ControlProblem tracking_problem(const TrackingConfig& cfg, std::size_t n_cells) {
  const ImexTableau tab = resolve_tableau(cfg.tableau);
  RelaxConfig relax = cfg.relax;
  if (cfg.fixed_speed && !relax.speed) {
    const Grid grid = make_grid(0.0, 2.0 * std::numbers::pi, n_cells);
    relax.speed = subchar_speed(burgers_model(), sine_profile(grid), relax);
  }
  return burgers_tracking_problem(n_cells, cfg.T, tab, relax, cfg.c_cfl, cfg.scheme);
}

std::vector<TrackingTableRow> tracking_table(const TrackingConfig& cfg) {
  if (cfg.grid_sizes.empty()) throw InputError("tracking_table: no grid sizes");
  std::vector<TrackingTableRow> rows;
  for (std::size_t n : cfg.grid_sizes) {
    TrackingTableRow row;
    row.n_cells = n;
    const ControlProblem prob = tracking_problem(cfg, n);
    const Field start(n, cfg.start_value);
    try {
      const DescentResult r = steepest_descent(prob, start, cfg.descent);
      row.iterations = r.report.iterations;
      row.final_cost = r.report.final_cost;
      row.converged = r.report.converged;
      row.wall_time_s = r.report.wall_time;
    } catch (const DivergenceError&) {
      row.diverged = true;
      row.final_cost = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

void write_tracking_csv(std::ostream& os, std::span<const TrackingTableRow> rows,
                        const std::string& header) {
  if (!header.empty()) os << "# " << header << '\n';
  os << "N,iterations,cpu_s,final_cost\n";
  os.precision(17);
  for (const auto& r : rows) {
    os << r.n_cells << ',' << r.iterations << ',' << r.wall_time_s << ','
       << r.final_cost << '\n';
  }
}

GradientReport gradient_report(const ControlProblem& prob,
                               std::span<const double> u0, double theta,
                               bool relative_theta) {
  GradientReport rep;
  rep.theta = theta;
  rep.relative_theta = relative_theta;
  rep.x = prob.grid.centers;
  rep.adjoint = adjoint_gradient(prob, u0);
  FdOptions fo;
  fo.relative = relative_theta;
  rep.fd = fd_gradient(prob, u0, theta, fo);
  const Field fd_half = fd_gradient(prob, u0, 0.5 * theta, fo);

  const std::size_t n = u0.size();
  double fd_max = 0.0;
  for (double v : rep.fd) fd_max = std::max(fd_max, std::abs(v));
  rep.rel_err.resize(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double diff = std::abs(rep.adjoint[i] - rep.fd[i]);
    const double denom = std::max(std::abs(rep.fd[i]), 1e-3 * fd_max);
    rep.rel_err[i] = denom > 0.0 ? diff / denom : diff;
    rep.max_abs_err = std::max(rep.max_abs_err, diff);
    sum += rep.rel_err[i];
    rep.richardson_estimate =
        std::max(rep.richardson_estimate, std::abs(rep.fd[i] - fd_half[i]) * 4.0 / 3.0);
  }
  rep.mean_rel_err = n ? sum / static_cast<double>(n) : 0.0;
  rep.max_rel_err = max_rel_deviation(rep.adjoint, rep.fd);
  return rep;
}

void write_gradient_report_csv(std::ostream& os, const GradientReport& rep,
                               const std::string& header) {
  if (!header.empty()) os << "# " << header << '\n';
  os << "# theta=" << rep.theta << (rep.relative_theta ? "*(1+|u0_i|)" : "")
     << " max_rel_err=" << rep.max_rel_err << " mean_rel_err=" << rep.mean_rel_err
     << " richardson_estimate=" << rep.richardson_estimate << '\n';
  os << "i,x,adjoint_grad,fd_grad,rel_err\n";
  os.precision(17);
  for (std::size_t i = 0; i < rep.adjoint.size(); ++i) {
    os << i << ',' << rep.x[i] << ',' << rep.adjoint[i] << ',' << rep.fd[i] << ','
       << rep.rel_err[i] << '\n';
  }
}

}  // namespace relaxopt

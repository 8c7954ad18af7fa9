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

#include "relaxopt/adjoint.hpp"

#include <ostream>

#include "relaxopt/error.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt {

AdjointForm parse_adjoint_form(const std::string& name) {
  if (name == "ark") return AdjointForm::ark;
  if (name == "xi") return AdjointForm::xi;
  if (name == "zeta") return AdjointForm::zeta;
  throw InputError("unknown adjoint form '" + name + "' (known: ark, xi, zeta)");
}

std::string to_string(AdjointForm form) {
  switch (form) {
    case AdjointForm::ark:
      return "ark";
    case AdjointForm::xi:
      return "xi";
    case AdjointForm::zeta:
      return "zeta";
  }
  return "ark";
}

Costate terminal_costate(std::span<const double> u_T,
                         std::span<const double> u_d, double dx) {
  if (u_T.size() != u_d.size()) {
    throw InputError("terminal_costate: u_T and u_d differ in length");
  }
  Costate c(u_T.size());
  for (std::size_t i = 0; i < u_T.size(); ++i) c.p[i] = dx * (u_T[i] - u_d[i]);
  return c;
}

namespace {

// Per-step linearisation data: frozen limiter patterns and f'(U_i).
class StepLinearization {
 public:
  StepLinearization(const SpatialOp& op, const FluxModel& model,
                    std::span<const RelaxState> stages)
      : op_(op), patterns_(stages.size()), fprime_(stages.size()) {
    for (std::size_t i = 0; i < stages.size(); ++i) {
      require_size(stages[i], op.grid.n_cells, "adjoint stage");
      patterns_[i] = freeze_slopes(op, stages[i]);
      fprime_[i].resize(stages[i].size());
      for (std::size_t k = 0; k < stages[i].size(); ++k) {
        fprime_[i][k] = model.flux_deriv(stages[i].u[k]);
      }
    }
  }

  /// out = (F'_i)^T x with F = -D_x g.
  void transport_t(std::size_t i, const Costate& x, Costate& out) const {
    apply_dx_transpose(op_, patterns_[i], x, out);
    for (auto& e : out.p) e = -e;
    for (auto& e : out.q) e = -e;
  }

  const Field& fprime(std::size_t i) const { return fprime_[i]; }

 private:
  const SpatialOp& op_;
  std::vector<SlopePattern> patterns_;
  std::vector<Field> fprime_;
};

void axpy(double alpha, const Costate& x, Costate& y) {
  const auto& kt = kernels::active();
  kt.axpy(alpha, x.p, y.p);
  kt.axpy(alpha, x.q, y.q);
}

Costate scaled(double alpha, const Costate& x) {
  Costate y(x.size());
  axpy(alpha, x, y);
  return y;
}

void check_args(const ImexTableau& tab, const SpatialOp& op,
                std::span<const RelaxState> stages, const Costate& p_next,
                double h, double eps) {
  if (stages.size() != tab.s) {
    throw InputError("adjoint step: expected " + std::to_string(tab.s) +
                     " stages, got " + std::to_string(stages.size()));
  }
  require_size(p_next, op.grid.n_cells, "adjoint step");
  if (!(h > 0.0)) throw InputError("adjoint step: step size must be positive");
  if (!(eps > 0.0)) throw InputError("adjoint step: epsilon must be positive");
}

void check_finite(const Costate& c, std::size_t step, std::size_t stage) {
  if (!all_finite(c.p) || !all_finite(c.q)) {
    throw DivergenceError(step, stage, "non-finite costate");
  }
}

}  // namespace

AdjointStepResult adjoint_step_zeta(const ImexTableau& tab,
                                    const SpatialOp& op,
                                    const FluxModel& model, double eps,
                                    std::span<const RelaxState> stages,
                                    const Costate& p_next, double h,
                                    std::size_t step_index) {
  check_args(tab, op, stages, p_next, h, eps);
  const std::size_t s = tab.s;
  const std::size_t n = p_next.size();
  const StepLinearization lin(op, model, stages);

  AdjointStepResult res;
  res.stage.assign(s, Costate(n));
  Costate E(n);
  for (std::size_t i = s; i-- > 0;) {
    Costate A = scaled(h * tab.w_tilde[i], p_next);
    Costate B = scaled(h * tab.w[i], p_next);
    for (std::size_t j = i + 1; j < s; ++j) {
      if (tab.a_tilde(j, i) != 0.0) axpy(h * tab.a_tilde(j, i), res.stage[j], A);
      if (tab.a_impl(j, i) != 0.0) axpy(h * tab.a_impl(j, i), res.stage[j], B);
    }
    lin.transport_t(i, A, E);
    // zeta = E + G'^T (B + c zeta), eliminated through its q-component.
    const double c = h * tab.a_impl(i, i);
    const double inv = 1.0 / (eps + c);
    const Field& fp = lin.fprime(i);
    Costate& z = res.stage[i];
    for (std::size_t k = 0; k < n; ++k) {
      const double t = (B.q[k] + c * E.q[k]) * inv;
      z.q[k] = E.q[k] - t;
      z.p[k] = E.p[k] + fp[k] * t;
    }
    check_finite(z, step_index, i);
  }
  res.p_n = p_next;
  for (std::size_t i = 0; i < s; ++i) axpy(1.0, res.stage[i], res.p_n);
  return res;
}

AdjointStepResult adjoint_step_xi(const ImexTableau& tab, const SpatialOp& op,
                                  const FluxModel& model, double eps,
                                  std::span<const RelaxState> stages,
                                  const Costate& p_next, double h,
                                  std::size_t step_index) {
  check_args(tab, op, stages, p_next, h, eps);
  const std::size_t s = tab.s;
  const std::size_t n = p_next.size();
  const StepLinearization lin(op, model, stages);

  AdjointStepResult res;
  res.stage_tilde.assign(s, Costate(n));
  res.stage.assign(s, Costate(n));
  std::vector<Costate> zeta(s, Costate(n));
  Costate E(n);
  for (std::size_t i = s; i-- > 0;) {
    Costate& xt = res.stage_tilde[i];
    Costate& xi = res.stage[i];
    xt = scaled(h * tab.w_tilde[i], p_next);
    xi = scaled(h * tab.w[i], p_next);
    for (std::size_t j = i + 1; j < s; ++j) {
      if (tab.a_tilde(j, i) != 0.0) axpy(h * tab.a_tilde(j, i), zeta[j], xt);
      if (tab.a_impl(j, i) != 0.0) axpy(h * tab.a_impl(j, i), zeta[j], xi);
    }
    lin.transport_t(i, xt, E);
    // (I - c G'^T) xi = B + c F'^T xi~
    const double c = h * tab.a_impl(i, i);
    const Field& fp = lin.fprime(i);
    for (std::size_t k = 0; k < n; ++k) {
      const double rq = xi.q[k] + c * E.q[k];
      const double rp = xi.p[k] + c * E.p[k];
      xi.q[k] = eps * rq / (eps + c);
      xi.p[k] = rp + c * fp[k] * rq / (eps + c);
    }
    // zeta = F'^T xi~ + G'^T xi
    Costate& z = zeta[i];
    for (std::size_t k = 0; k < n; ++k) {
      z.p[k] = E.p[k] + fp[k] * xi.q[k] / eps;
      z.q[k] = E.q[k] - xi.q[k] / eps;
    }
    check_finite(xi, step_index, i);
    check_finite(z, step_index, i);
  }
  res.p_n = p_next;
  for (std::size_t i = 0; i < s; ++i) axpy(1.0, zeta[i], res.p_n);
  return res;
}

AdjointStepResult adjoint_step_ark(const AdjointCoeffs& coeffs,
                                   const ImexTableau& tab, const SpatialOp& op,
                                   const FluxModel& model, double eps,
                                   std::span<const RelaxState> stages,
                                   const Costate& p_next, double h,
                                   std::size_t step_index) {
  check_args(tab, op, stages, p_next, h, eps);
  const std::size_t s = tab.s;
  const std::size_t n = p_next.size();
  const StepLinearization lin(op, model, stages);
  const auto& wt = tab.w_tilde;
  const auto& w = tab.w;

  AdjointStepResult res;
  res.stage_tilde.assign(s, Costate(n));
  res.stage.assign(s, Costate(n));
  std::vector<Costate> E(s, Costate(n));  // F'^T P~
  std::vector<Costate> H(s, Costate(n));  // G'^T P
  for (std::size_t i = s; i-- > 0;) {
    Costate& Pt = res.stage_tilde[i];
    Pt = p_next;
    for (std::size_t j = i + 1; j < s; ++j) {
      axpy(h * (wt[j] - coeffs.alpha_tilde(i, j)), E[j], Pt);
      axpy(h * (w[j] - coeffs.alpha(i, j)), H[j], Pt);
    }
    lin.transport_t(i, Pt, E[i]);

    Costate R = p_next;
    for (std::size_t j = i; j < s; ++j) {
      axpy(h * (wt[j] - coeffs.beta_tilde(i, j)), E[j], R);
      if (j > i) axpy(h * (w[j] - coeffs.beta(i, j)), H[j], R);
    }
    // P = R + d G'^T P, implicit only through P.q.
    const double d = h * (w[i] - coeffs.beta(i, i));
    const Field& fp = lin.fprime(i);
    Costate& P = res.stage[i];
    for (std::size_t k = 0; k < n; ++k) {
      P.q[k] = eps * R.q[k] / (eps + d);
      P.p[k] = R.p[k] + d * fp[k] * R.q[k] / (eps + d);
      H[i].p[k] = fp[k] * P.q[k] / eps;
      H[i].q[k] = -P.q[k] / eps;
    }
    check_finite(P, step_index, i);
  }
  res.p_n = p_next;
  for (std::size_t j = 0; j < s; ++j) {
    axpy(h * wt[j], E[j], res.p_n);
    axpy(h * w[j], H[j], res.p_n);
  }
  check_finite(res.p_n, step_index, s);
  return res;
}

AdjointSweepRecord sweep_adjoint(const Trajectory& traj,
                                 const ControlProblem& prob,
                                 const ImexTableau& tab,
                                 const Costate& terminal,
                                 const AdjointOptions& opts) {
  const std::size_t N = traj.n_steps();
  if (N == 0) throw InputError("sweep_adjoint: empty trajectory");
  require_size(terminal, prob.grid.n_cells, "terminal costate");

  AdjointSweepRecord rec;
  rec.form_requested = opts.form;
  rec.form_used = opts.form;
  AdjointCoeffs coeffs;
  if (opts.form == AdjointForm::ark) {
    try {
      coeffs = adjoint_coeffs(tab);
    } catch (const ZeroWeightError&) {
      rec.form_used = AdjointForm::xi;
    }
  }

  const SpatialOp op = spatial_op_for(prob, traj.a);
  rec.costates.assign(N + 1, Costate());
  rec.costates[N] = terminal;
  if (opts.keep_stage_costates) {
    rec.stage_tilde.resize(N);
    rec.stage.resize(N);
  }
  for (std::size_t n = N; n-- > 0;) {
    const double h = traj.times[n + 1] - traj.times[n];
    std::vector<RelaxState> recomputed;
    std::span<const RelaxState> stages;
    if (traj.has_stages()) {
      stages = traj.stages[n];
    } else {
      recomputed = stages_of(traj, prob, tab, n);
      stages = recomputed;
    }
    AdjointStepResult r;
    switch (rec.form_used) {
      case AdjointForm::ark:
        r = adjoint_step_ark(coeffs, tab, op, prob.model, traj.epsilon, stages,
                             rec.costates[n + 1], h, n);
        break;
      case AdjointForm::xi:
        r = adjoint_step_xi(tab, op, prob.model, traj.epsilon, stages,
                            rec.costates[n + 1], h, n);
        break;
      case AdjointForm::zeta:
        r = adjoint_step_zeta(tab, op, prob.model, traj.epsilon, stages,
                              rec.costates[n + 1], h, n);
        break;
    }
    rec.costates[n] = std::move(r.p_n);
    if (opts.keep_stage_costates) {
      rec.stage_tilde[n] = std::move(r.stage_tilde);
      rec.stage[n] = std::move(r.stage);
    }
  }
  return rec;
}

AdjointSweepRecord solve_adjoint(const Trajectory& traj,
                                 const ControlProblem& prob,
                                 const ImexTableau& tab,
                                 const AdjointOptions& opts) {
  return sweep_adjoint(traj, prob, tab,
                       terminal_costate(traj.terminal().u, prob.u_d, prob.grid.dx),
                       opts);
}

AdjointSweepRecord solve_adjoint(const Trajectory& traj,
                                 const ControlProblem& prob,
                                 const AdjointOptions& opts) {
  return solve_adjoint(traj, prob, prob.tableau, opts);
}

Field assemble_gradient(const AdjointSweepRecord& record,
                        std::span<const double> u0, const FluxModel& model) {
  const Costate& c0 = record.initial();
  if (c0.size() != u0.size()) throw InputError("assemble_gradient: size mismatch");
  Field g(u0.size());
  for (std::size_t i = 0; i < u0.size(); ++i) {
    g[i] = c0.p[i] + model.flux_deriv(u0[i]) * c0.q[i];
  }
  return g;
}

void write_gradient_csv(std::ostream& os, const Grid& grid,
                        std::span<const double> u0,
                        std::span<const double> grad,
                        const std::string& header) {
  if (u0.size() != grad.size() || u0.size() != grid.n_cells) {
    throw InputError("write_gradient_csv: size mismatch");
  }
  if (!header.empty()) os << "# " << header << '\n';
  os << "i,x,u0,grad\n";
  os.precision(17);
  for (std::size_t i = 0; i < u0.size(); ++i) {
    os << i << ',' << grid.centers[i] << ',' << u0[i] << ',' << grad[i] << '\n';
  }
}

}  // namespace relaxopt

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

#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "relaxopt/adjoint.hpp"
#include "relaxopt/error.hpp"
#include "relaxopt/forward.hpp"
#include "relaxopt/optimize.hpp"
#include "relaxopt/problem.hpp"

namespace relaxopt {
namespace {

using oracle::Vec;

double pair_dot(const Costate& c, const RelaxState& y) {
  return oracle::dot(c.p, y.u) + oracle::dot(c.q, y.v);
}

double costate_diff(const Costate& a, const Costate& b) {
  return std::max(oracle::max_abs_diff(a.p, b.p), oracle::max_abs_diff(a.q, b.q));
}

double costate_norm(const Costate& a) {
  return std::max(oracle::max_abs(a.p), oracle::max_abs(a.q));
}

Costate random_costate(std::size_t n, std::uint64_t seed) {
  return Costate(oracle::random_vec(n, seed), oracle::random_vec(n, seed + 1000));
}

RelaxState random_state(const Grid& g, std::uint64_t seed) {
  return RelaxState(oracle::smooth_random(g.centers, seed),
                    oracle::smooth_random(g.centers, seed + 1, 0.3, 0.3));
}

SpatialOp op_on(std::size_t n, double a, Scheme scheme = Scheme::upwind1) {
  SpatialOp op;
  op.grid = make_grid(0.0, 2.0 * M_PI, n);
  op.a = a;
  op.scheme = scheme;
  return op;
}

enum class Which { ark, xi, zeta };

AdjointStepResult step_adjoint(Which w, const ImexTableau& tab, const SpatialOp& op,
                               const FluxModel& m, double eps,
                               const std::vector<RelaxState>& stages, const Costate& p,
                               double h) {
  switch (w) {
    case Which::ark:
      return adjoint_step_ark(adjoint_coeffs(tab), tab, op, m, eps, stages, p, h);
    case Which::xi:
      return adjoint_step_xi(tab, op, m, eps, stages, p, h);
    case Which::zeta:
      break;
  }
  return adjoint_step_zeta(tab, op, m, eps, stages, p, h);
}

TEST(TerminalCostate, Examples) {
  const Costate c = terminal_costate(Field{1.0, 2.0}, Field{0.0, 0.0}, 0.5);
  EXPECT_EQ(c.p, (Field{0.5, 1.0}));
  EXPECT_EQ(c.q, (Field{0.0, 0.0}));
  const Costate z = terminal_costate(Field{0.3, 0.3}, Field{0.3, 0.3}, 0.1);
  EXPECT_EQ(z.p, (Field{0.0, 0.0}));
  EXPECT_THROW(terminal_costate(Field{1.0}, Field{1.0, 2.0}, 0.1), InputError);
}

TEST(AdjointStep, EulerMatchesFourLineBackwardScheme) {
  const FluxModel m = burgers_model();
  const SpatialOp op = op_on(24, 1.8);
  const ImexTableau tab = builtin_tableau("imex-euler");
  const double h = 0.5 * op.grid.dx / op.a;
  for (double eps : {1e-6, 1e-2, 1.0}) {
    const RelaxState y = random_state(op.grid, 5);
    const auto stages = imex_step(tab, op, m, eps, y, h).stages;
    const Costate lam = random_costate(24, 9);
    Vec p = lam.p, q = lam.q;
    oracle::imex_euler_adjoint_step(p, q, y.u, op.a, op.grid.dx, h, eps, m.flux_deriv);
    for (Which w : {Which::ark, Which::xi, Which::zeta}) {
      const Costate got = step_adjoint(w, tab, op, m, eps, stages, lam, h).p_n;
      EXPECT_LE(oracle::max_abs_diff(got.p, p), 1e-13) << eps;
      EXPECT_LE(oracle::max_abs_diff(got.q, q), 1e-13) << eps;
    }
  }
}

// For a linear flux the step is a linear map M of y_n, so the adjoint step
// must satisfy <adj(lambda), d> = <lambda, M d> for every direction d.
TEST(AdjointStep, TransposeOfLinearStep) {
  const FluxModel m = linear_advection_model(0.8);
  const SpatialOp op = op_on(16, 1.0);
  const double h = 0.45 * op.grid.dx;
  for (const auto& name : builtin_tableau_names()) {
    const ImexTableau tab = builtin_tableau(name);
    for (double eps : {1e-6, 1e-2, 1.0}) {
      const RelaxState d(oracle::random_vec(16, 1), oracle::random_vec(16, 2));
      const StepResult fw = imex_step(tab, op, m, eps, d, h);
      const Costate lam = random_costate(16, 3);
      for (Which w : {Which::ark, Which::xi, Which::zeta}) {
        if (w == Which::ark && name != "imex-euler" && name != "ssp2-222" &&
            name != "kutta-dirk-3" && name != "ralston-dirk-3") {
          continue;  // zero weights: ark is undefined
        }
        const Costate back = step_adjoint(w, tab, op, m, eps, fw.stages, lam, h).p_n;
        const double lhs = pair_dot(back, d);
        const double rhs = pair_dot(lam, fw.next);
        EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(rhs))) << name << " " << eps;
      }
    }
  }
}

// Nonlinear flux: the adjoint step against a central-difference Jacobian.
TEST(AdjointStep, TransposeOfBurgersLinearisation) {
  const FluxModel m = burgers_model();
  for (Scheme scheme : {Scheme::upwind1, Scheme::muscl2}) {
    const SpatialOp op = op_on(32, 1.8, scheme);
    const double h = 0.5 * op.grid.dx / op.a;
    for (const char* name : {"ars-222", "bpr-343", "ssp2-222"}) {
      const ImexTableau tab = builtin_tableau(name);
      const double eps = 1e-4;
      const RelaxState y = random_state(op.grid, 17);
      const auto stages = imex_step(tab, op, m, eps, y, h).stages;
      const RelaxState d(oracle::random_vec(32, 4), oracle::random_vec(32, 5));
      const double th = 1e-6;
      RelaxState yp = y, ym = y;
      for (std::size_t i = 0; i < 32; ++i) {
        yp.u[i] += th * d.u[i];
        yp.v[i] += th * d.v[i];
        ym.u[i] -= th * d.u[i];
        ym.v[i] -= th * d.v[i];
      }
      const RelaxState a = imex_step(tab, op, m, eps, yp, h).next;
      const RelaxState b = imex_step(tab, op, m, eps, ym, h).next;
      const Costate lam = random_costate(32, 6);
      const double fd =
          (pair_dot(lam, a) - pair_dot(lam, b)) / (2.0 * th);
      const double adj =
          pair_dot(step_adjoint(Which::xi, tab, op, m, eps, stages, lam, h).p_n, d);
      EXPECT_NEAR(adj, fd, 1e-6 * std::max(1.0, std::abs(fd))) << name;
    }
  }
}

TEST(AdjointStep, ArkStageCostatesAreNormalisedXi) {
  const FluxModel m = burgers_model();
  const SpatialOp op = op_on(20, 1.8);
  const double h = 0.5 * op.grid.dx / op.a;
  for (const char* name : {"ralston-dirk-3", "kutta-dirk-3", "ssp2-222"}) {
    const ImexTableau tab = builtin_tableau(name);
    const RelaxState y = random_state(op.grid, 31);
    const auto stages = imex_step(tab, op, m, 1e-3, y, h).stages;
    const Costate lam = random_costate(20, 32);
    const auto ark = step_adjoint(Which::ark, tab, op, m, 1e-3, stages, lam, h);
    const auto xi = step_adjoint(Which::xi, tab, op, m, 1e-3, stages, lam, h);
    ASSERT_EQ(ark.stage_tilde.size(), tab.s);
    ASSERT_EQ(xi.stage.size(), tab.s);
    for (std::size_t i = 0; i < tab.s; ++i) {
      for (std::size_t k = 0; k < 20; ++k) {
        const double sc = std::max(1.0, costate_norm(ark.stage_tilde[i]));
        EXPECT_NEAR(xi.stage_tilde[i].p[k] / (h * tab.w_tilde[i]),
                    ark.stage_tilde[i].p[k], 1e-12 * sc);
        EXPECT_NEAR(xi.stage_tilde[i].q[k] / (h * tab.w_tilde[i]),
                    ark.stage_tilde[i].q[k], 1e-12 * sc);
        const double sp = std::max(1.0, costate_norm(ark.stage[i]));
        EXPECT_NEAR(xi.stage[i].p[k] / (h * tab.w[i]), ark.stage[i].p[k], 1e-12 * sp);
        EXPECT_NEAR(xi.stage[i].q[k] / (h * tab.w[i]), ark.stage[i].q[k], 1e-12 * sp);
      }
    }
  }
}

TEST(AdjointStep, ZetaIncrementsSumToUpdate) {
  const FluxModel m = burgers_model();
  const SpatialOp op = op_on(20, 1.8);
  const ImexTableau tab = builtin_tableau("ars-443");
  const double h = 0.5 * op.grid.dx / op.a;
  const RelaxState y = random_state(op.grid, 41);
  const auto stages = imex_step(tab, op, m, 1e-6, y, h).stages;
  const Costate lam = random_costate(20, 42);
  const auto r = step_adjoint(Which::zeta, tab, op, m, 1e-6, stages, lam, h);
  ASSERT_EQ(r.stage.size(), tab.s);
  EXPECT_TRUE(r.stage_tilde.empty());
  for (std::size_t k = 0; k < 20; ++k) {
    double sp = lam.p[k], sq = lam.q[k];
    for (const auto& z : r.stage) {
      sp += z.p[k];
      sq += z.q[k];
    }
    EXPECT_NEAR(sp, r.p_n.p[k], 1e-12);
    EXPECT_NEAR(sq, r.p_n.q[k], 1e-12);
  }
}

TEST(AdjointStep, ArkRejectsZeroWeights) {
  EXPECT_THROW(
      {
        const ImexTableau tab = builtin_tableau("ars-222");
        (void)adjoint_coeffs(tab);
      },
      ZeroWeightError);
}

ControlProblem problem(const std::string& tab, double eps, std::size_t n = 32,
                       double T = 0.5, Scheme scheme = Scheme::upwind1) {
  RelaxConfig relax;
  relax.epsilon = eps;
  ControlProblem p = burgers_tracking_problem(n, T, builtin_tableau(tab), relax, 0.5, scheme);
  p.u_d.assign(n, 0.5);
  return p;
}

TEST(Sweep, FormsAgree) {
  struct Case {
    const char* name;
    double eps;
  };
  for (const Case c : {Case{"ars-222", 1e-6}, Case{"ssp2-222", 1e-6}, Case{"bpr-343", 1e-6},
                       Case{"kutta-dirk-3", 1.0}, Case{"ralston-dirk-3", 1.0}}) {
    const ControlProblem prob = problem(c.name, c.eps);
    const Field u0 = sine_profile(prob.grid);
    const Trajectory tr = solve_forward(prob, u0);
    const Costate xi = solve_adjoint(tr, prob, {AdjointForm::xi, false}).initial();
    const Costate zeta = solve_adjoint(tr, prob, {AdjointForm::zeta, false}).initial();
    const auto ark = solve_adjoint(tr, prob, {AdjointForm::ark, false});
    const double sc = costate_norm(xi);
    EXPECT_LE(costate_diff(xi, zeta), 1e-11 * sc) << c.name;
    EXPECT_LE(costate_diff(xi, ark.initial()), 1e-11 * sc) << c.name;
    const bool zero_weight = std::string(c.name) == "ars-222" || std::string(c.name) == "bpr-343";
    EXPECT_EQ(ark.form_requested, AdjointForm::ark);
    EXPECT_EQ(ark.form_used, zero_weight ? AdjointForm::xi : AdjointForm::ark) << c.name;
  }
}

TEST(Sweep, ZeroWeightPairFallsBackAndStaysExact) {
  // Explicit transport then implicit relaxation, written as a 2-stage pair
  // whose first implicit and second explicit weights vanish.
  Matrix at(2, 2), a(2, 2);
  at(1, 0) = 1.0;
  a(1, 1) = 1.0;
  const ImexTableau tab = make_tableau("split-euler", at, a, {1.0, 0.0}, {0.0, 1.0});
  ControlProblem prob = problem("imex-euler", 1e-6, 24, 0.3);
  prob.tableau = tab;
  const Field u0 = sine_profile(prob.grid);
  const Trajectory tr = solve_forward(prob, u0);
  const auto rec = solve_adjoint(tr, prob, {AdjointForm::ark, false});
  EXPECT_EQ(rec.form_used, AdjointForm::xi);
  const Costate z = solve_adjoint(tr, prob, {AdjointForm::zeta, false}).initial();
  EXPECT_LE(costate_diff(rec.initial(), z), 1e-12 * costate_norm(z));
  const Field g = assemble_gradient(rec, u0, prob.model);
  const Field fd = fd_gradient(prob, u0, 1e-6);
  EXPECT_LE(max_rel_deviation(g, fd), 1e-6);
}

TEST(Sweep, LinearInTerminalCostate) {
  const ControlProblem prob = problem("ars-443", 1e-6, 24);
  const Trajectory tr = solve_forward(prob, sine_profile(prob.grid));
  const Costate l1 = random_costate(24, 51), l2 = random_costate(24, 52);
  Costate l3(24);
  for (std::size_t i = 0; i < 24; ++i) {
    l3.p[i] = l1.p[i] + 2.0 * l2.p[i];
    l3.q[i] = l1.q[i] + 2.0 * l2.q[i];
  }
  const Costate a = sweep_adjoint(tr, prob, prob.tableau, l1).initial();
  const Costate b = sweep_adjoint(tr, prob, prob.tableau, l2).initial();
  const Costate c = sweep_adjoint(tr, prob, prob.tableau, l3).initial();
  Costate comb(24);
  for (std::size_t i = 0; i < 24; ++i) {
    comb.p[i] = a.p[i] + 2.0 * b.p[i];
    comb.q[i] = a.q[i] + 2.0 * b.q[i];
  }
  EXPECT_LE(costate_diff(c, comb), 1e-13 * std::max(1.0, costate_norm(c)));

  const Costate zero = sweep_adjoint(tr, prob, prob.tableau, Costate(24)).initial();
  EXPECT_EQ(oracle::max_abs(zero.p), 0.0);
  EXPECT_EQ(oracle::max_abs(zero.q), 0.0);
}

TEST(Sweep, StoredAndRecomputedStagesAgree) {
  const ControlProblem prob = problem("ars-222", 1e-6, 24);
  const Field u0 = sine_profile(prob.grid);
  const auto full = solve_adjoint(solve_forward(prob, u0, true), prob);
  const auto lean = solve_adjoint(solve_forward(prob, u0, false), prob);
  EXPECT_EQ(full.initial().p, lean.initial().p);
  EXPECT_EQ(full.initial().q, lean.initial().q);
}

TEST(Sweep, RecordShape) {
  const ControlProblem prob = problem("ssp2-222", 1e-6, 16, 0.2);
  const Trajectory tr = solve_forward(prob, sine_profile(prob.grid));
  const auto rec = solve_adjoint(tr, prob, {AdjointForm::ark, true});
  EXPECT_EQ(rec.costates.size(), tr.n_steps() + 1);
  EXPECT_EQ(rec.stage.size(), tr.n_steps());
  EXPECT_EQ(rec.stage_tilde.size(), tr.n_steps());
  EXPECT_EQ(rec.stage.front().size(), 2u);
  const Costate term = terminal_costate(tr.terminal().u, prob.u_d, prob.grid.dx);
  EXPECT_EQ(rec.costates.back().p, term.p);
  EXPECT_THROW(sweep_adjoint(tr, prob, prob.tableau, Costate(15)), InputError);
}

TEST(AssembleGradient, ChainRuleThroughEquilibrium) {
  AdjointSweepRecord rec;
  rec.costates = {Costate(Field{1.0, 2.0}, Field{3.0, 4.0})};
  const Field g = assemble_gradient(rec, Field{0.5, -1.0}, burgers_model());
  EXPECT_DOUBLE_EQ(g[0], 2.5);
  EXPECT_DOUBLE_EQ(g[1], -2.0);
  EXPECT_THROW(assemble_gradient(rec, Field{0.5}, burgers_model()), InputError);
}

TEST(Gradient, MusclMatchesFiniteDifferences) {
  // Minmod has a kink wherever neighbouring values coincide, as they do for
  // the symmetric sine data at its extrema; there the central difference
  // averages two one-sided slopes. Use data without such ties.
  const ControlProblem prob = problem("ars-222", 1e-6, 32, 0.3, Scheme::muscl2);
  for (std::uint64_t seed : {7u, 8u}) {
    const Field u0 = oracle::smooth_random(prob.grid.centers, seed);
    const Field g = adjoint_gradient(prob, u0);
    const Field fd = fd_gradient(prob, u0, 1e-7);
    EXPECT_LE(max_rel_deviation(g, fd), 1e-5) << seed;
  }
}

TEST(Gradient, MusclKinkAtTiesKeepsTheSum) {
  // At an exact tie the adjoint takes the zero slope; the two affected
  // components differ from the central difference but their sum does not.
  RelaxConfig relax;
  relax.epsilon = 1.0;
  ControlProblem prob =
      burgers_tracking_problem(32, 0.3, builtin_tableau("imex-euler"), relax, 0.5, Scheme::muscl2);
  prob.u_d.assign(32, 0.5);
  const Field u0 = sine_profile(prob.grid);
  const Field g = adjoint_gradient(prob, u0);
  const Field fd = fd_gradient(prob, u0, 1e-6);
  EXPECT_NEAR(g[7] + g[8], fd[7] + fd[8], 1e-7);
  EXPECT_NEAR(g[0], fd[0], 1e-8);
}

TEST(AdjointForm, Names) {
  for (AdjointForm f : {AdjointForm::ark, AdjointForm::xi, AdjointForm::zeta}) {
    EXPECT_EQ(parse_adjoint_form(to_string(f)), f);
  }
  EXPECT_THROW(parse_adjoint_form("lambda"), InputError);
}

TEST(GradientCsv, Columns) {
  const Grid g = make_grid(0.0, 1.0, 2);
  std::ostringstream os;
  write_gradient_csv(os, g, Field{1.0, 2.0}, Field{0.1, 0.2}, "h");
  EXPECT_EQ(os.str().substr(0, 17), "# h\ni,x,u0,grad\n0");
}

}  // namespace
}  // namespace relaxopt

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
#include "relaxopt/error.hpp"
#include "relaxopt/studies.hpp"

namespace relaxopt {
namespace {

TEST(FitSlope, ExactPowerLaws) {
  const Field h{0.1, 0.05, 0.025, 0.0125};
  for (double p : {1.0, 2.0, 3.0}) {
    Field e;
    for (double x : h) e.push_back(7.0 * std::pow(x, p));
    EXPECT_NEAR(fit_slope(h, e), p, 1e-12);
  }
  EXPECT_THROW(fit_slope(Field{0.1}, Field{1.0}), InputError);
  EXPECT_THROW(fit_slope(Field{0.1, 0.05}, Field{1.0, 0.0}), InputError);
}

TEST(Checkpointing, ReproducesTheStoredSweep) {
  RelaxConfig relax;
  ControlProblem prob = burgers_tracking_problem(40, 0.5, builtin_tableau("ars-222"), relax);
  prob.u_d.assign(40, 0.5);
  const Field u0 = sine_profile(prob.grid);
  const GradientEval full = cost_and_gradient(prob, u0);
  for (std::size_t stride : {1u, 3u, 7u, 1000u}) {
    const GradientEval ck = cost_and_gradient_checkpointed(prob, u0, stride);
    EXPECT_EQ(ck.grad, full.grad) << stride;
    EXPECT_EQ(ck.cost, full.cost);
  }
  EXPECT_THROW(cost_and_gradient_checkpointed(prob, u0, 0), InputError);
}

TEST(OrderStudy, SmallSelfConvergence) {
  OrderStudyConfig cfg;
  cfg.n_cells = 128;
  cfg.T = 0.25;
  cfg.levels = 3;
  cfg.ref_extra = 2;
  struct Case {
    const char* name;
    double order;
  };
  for (const Case c : {Case{"imex-euler", 1.0}, Case{"ars-222", 2.0}}) {
    const OrderStudyResult r = temporal_order_study(builtin_tableau(c.name), cfg);
    ASSERT_EQ(r.levels.size(), 3u);
    for (std::size_t l = 1; l < r.levels.size(); ++l) {
      EXPECT_NEAR(r.levels[l].h, 0.5 * r.levels[l - 1].h, 1e-15);
    }
    EXPECT_NEAR(r.h_ref, r.levels.back().h / 4.0, 1e-15);
    EXPECT_NEAR(r.forward_order, c.order, 0.25) << c.name;
    EXPECT_NEAR(r.gradient_order, c.order, 0.3) << c.name;
    EXPECT_EQ(r.target_order, builtin_claimed_order(c.name));
    EXPECT_FALSE(r.inconclusive);
  }
}

TEST(OrderStudy, CsvSchema) {
  OrderStudyResult r;
  r.tableau = "t";
  r.levels = {{0.5, 1.0, 2.0}};
  std::ostringstream os;
  write_order_csv(os, std::span<const OrderStudyResult>(&r, 1), "h");
  EXPECT_EQ(os.str(), "# h\ntableau,h,err_forward,err_gradient\nt,0.5,1,2\n");
}

TEST(Tracking, FixedSpeedProblem) {
  TrackingConfig cfg;
  const ControlProblem prob = tracking_problem(cfg, 60);
  ASSERT_TRUE(prob.relax.speed.has_value());
  EXPECT_NEAR(*prob.relax.speed, 1.2 * 1.5, 5e-3);
  EXPECT_LE(reduced_cost(prob, sine_profile(prob.grid)), 1e-20);
  cfg.fixed_speed = false;
  EXPECT_FALSE(tracking_problem(cfg, 60).relax.speed.has_value());
}

TEST(Tracking, SingleGridRow) {
  TrackingConfig cfg;
  cfg.grid_sizes = {50};
  const auto rows = tracking_table(cfg);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_cells, 50u);
  EXPECT_TRUE(rows[0].converged);
  EXPECT_FALSE(rows[0].diverged);
  EXPECT_LT(rows[0].final_cost, 1e-2);
  EXPECT_GT(rows[0].iterations, 10u);
  EXPECT_GT(rows[0].wall_time_s, 0.0);
  std::ostringstream os;
  write_tracking_csv(os, rows);
  EXPECT_EQ(os.str().rfind("N,iterations,cpu_s,final_cost\n", 0), 0u);
  cfg.grid_sizes.clear();
  EXPECT_THROW(tracking_table(cfg), InputError);
}

TEST(GradientReport, AgreementAndColumns) {
  ControlProblem prob = burgers_tracking_problem(30, 0.5, builtin_tableau("imex-euler"));
  prob.u_d.assign(30, 0.5);
  const GradientReport rep = gradient_report(prob, sine_profile(prob.grid));
  ASSERT_EQ(rep.adjoint.size(), 30u);
  ASSERT_EQ(rep.fd.size(), 30u);
  ASSERT_EQ(rep.rel_err.size(), 30u);
  EXPECT_EQ(rep.x, prob.grid.centers);
  EXPECT_LE(rep.max_rel_err, 1e-6);
  EXPECT_LE(rep.mean_rel_err, rep.max_rel_err * 1e3);
  EXPECT_LE(rep.richardson_estimate, 1e-6);
  EXPECT_GE(rep.max_abs_err, 0.0);
  std::ostringstream os;
  write_gradient_report_csv(os, rep);
  std::istringstream is(os.str());
  std::string line;
  std::getline(is, line);
  EXPECT_EQ(line.rfind("# theta=", 0), 0u);
  std::getline(is, line);
  EXPECT_EQ(line, "i,x,adjoint_grad,fd_grad,rel_err");
}

}  // namespace
}  // namespace relaxopt

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
#include <limits>

#include "relaxopt/core.hpp"
#include "relaxopt/error.hpp"
#include "relaxopt/problem.hpp"

namespace relaxopt {
namespace {

TEST(Grid, CellCentresAndSpacing) {
  const Grid g = make_grid(0.0, 4.0, 4);
  EXPECT_DOUBLE_EQ(g.dx, 1.0);
  ASSERT_EQ(g.centers.size(), 4u);
  EXPECT_DOUBLE_EQ(g.centers[0], 0.5);
  EXPECT_DOUBLE_EQ(g.centers[3], 3.5);
  EXPECT_EQ(g.size(), 4u);
}

TEST(Grid, RejectsDegenerateInput) {
  EXPECT_THROW(make_grid(0.0, 1.0, 1), InputError);
  EXPECT_THROW(make_grid(1.0, 1.0, 10), InputError);
  EXPECT_THROW(make_grid(0.0, std::numeric_limits<double>::infinity(), 10),
               InputError);
}

TEST(FluxModel, BurgersAndLinear) {
  const FluxModel b = burgers_model();
  EXPECT_DOUBLE_EQ(b.flux(3.0), 4.5);
  EXPECT_DOUBLE_EQ(b.flux_deriv(-2.0), -2.0);
  const FluxModel l = linear_advection_model(2.5);
  EXPECT_DOUBLE_EQ(l.flux(2.0), 5.0);
  EXPECT_DOUBLE_EQ(l.flux_deriv(7.0), 2.5);
  EXPECT_EQ(flux_model_by_name("linear").name, "linear");
  EXPECT_THROW(flux_model_by_name("euler"), RegistryError);
}

TEST(SubcharSpeed, SafetyTimesMaxDerivative) {
  RelaxConfig cfg;
  const Field u{0.5, -1.5, 1.0};
  EXPECT_DOUBLE_EQ(subchar_speed(burgers_model(), u, cfg), 1.2 * 1.5);
}

TEST(SubcharSpeed, FloorAppliesToSmallFields) {
  RelaxConfig cfg;
  const Field u{0.0, 0.01};
  EXPECT_DOUBLE_EQ(subchar_speed(burgers_model(), u, cfg), 0.1);
}

TEST(SubcharSpeed, SatisfiesSubcharacteristicCondition) {
  RelaxConfig cfg;
  for (double amp : {0.0, 0.3, 1.0, 7.0}) {
    const Field u{amp, -0.5 * amp, 0.25};
    const double a = subchar_speed(burgers_model(), u, cfg);
    for (double ui : u) EXPECT_GE(a, std::abs(ui));
  }
}

TEST(SubcharSpeed, RejectsNonFiniteAndEmpty) {
  RelaxConfig cfg;
  const Field bad{0.0, std::nan("")};
  EXPECT_THROW(subchar_speed(burgers_model(), bad, cfg), InputError);
  EXPECT_THROW(subchar_speed(burgers_model(), Field{}, cfg), InputError);
}

TEST(RelaxConfig, Validation) {
  RelaxConfig cfg;
  EXPECT_NO_THROW(validate(cfg));
  cfg.epsilon = 0.0;
  EXPECT_THROW(validate(cfg), InputError);
  cfg = RelaxConfig{};
  cfg.safety = 0.9;
  EXPECT_THROW(validate(cfg), InputError);
  cfg = RelaxConfig{};
  cfg.speed = -1.0;
  EXPECT_THROW(validate(cfg), InputError);
}

TEST(RelaxInit, VEqualsFluxOfU) {
  const Field u0{1.0, -2.0, 0.5};
  const RelaxState s = relax_init(u0, burgers_model());
  EXPECT_EQ(s.u, u0);
  EXPECT_DOUBLE_EQ(s.v[0], 0.5);
  EXPECT_DOUBLE_EQ(s.v[1], 2.0);
  EXPECT_DOUBLE_EQ(s.v[2], 0.125);
}

TEST(StepPlan, LastStepLandsOnT) {
  const StepPlan p = plan_steps(1.0, 0.3);
  EXPECT_EQ(p.n_steps, 4u);
  EXPECT_DOUBLE_EQ(p.times.back(), 1.0);
  EXPECT_NEAR(p.step(3), 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(p.step(0), 0.3);
}

TEST(StepPlan, ExactMultipleHasNoSliver) {
  const StepPlan p = plan_steps(1.0, 0.1);
  EXPECT_EQ(p.n_steps, 10u);
  EXPECT_NEAR(p.step(9), 0.1, 1e-12);
}

TEST(StepPlan, StepShorterThanHorizon) {
  const StepPlan p = plan_steps(0.05, 0.1);
  EXPECT_EQ(p.n_steps, 1u);
  EXPECT_DOUBLE_EQ(p.step(0), 0.05);
  EXPECT_THROW(plan_steps(0.0, 0.1), InputError);
}

TEST(ControlProblem, ValidationNamesTheProblem) {
  ControlProblem prob = burgers_tracking_problem(16, 0.5, builtin_tableau("imex-euler"));
  EXPECT_NO_THROW(validate(prob));
  prob.u_d.pop_back();
  EXPECT_THROW(validate(prob), InputError);
  prob.u_d.push_back(0.0);
  prob.T = -1.0;
  EXPECT_THROW(validate(prob), InputError);
}

TEST(ControlProblem, SpeedOverrideWins) {
  ControlProblem prob = burgers_tracking_problem(16, 0.5, builtin_tableau("imex-euler"));
  const Field u0(16, 3.0);
  EXPECT_DOUBLE_EQ(speed_for(prob, u0), 3.6);
  prob.relax.speed = 5.0;
  EXPECT_DOUBLE_EQ(speed_for(prob, u0), 5.0);
}

}  // namespace
}  // namespace relaxopt

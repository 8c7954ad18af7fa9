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
#include <cstdlib>
#include <vector>

#include "oracles.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt::kernels {
namespace {

const std::size_t kSizes[] = {2, 3, 4, 5, 7, 8, 9, 16, 17, 64, 1001};

TEST(ScalarKernels, UpwindMatchesPrimitiveFormOracle) {
  for (std::size_t n : kSizes) {
    const auto u = oracle::random_vec(n, 1 + n);
    const auto v = oracle::random_vec(n, 2 + n);
    std::vector<double> du(n), dv(n), ru, rv;
    scalar_table().upwind_dx(u, v, 1.7, 1.0 / 0.3, du, dv);
    oracle::upwind_dx(u, v, 1.7, 0.3, ru, rv);
    EXPECT_LE(oracle::max_abs_diff(du, ru), 1e-13) << n;
    EXPECT_LE(oracle::max_abs_diff(dv, rv), 1e-13) << n;
  }
}

TEST(ScalarKernels, TransposeMatchesDenseTranspose) {
  for (std::size_t n : {2u, 3u, 5u, 8u, 13u}) {
    const auto m = oracle::upwind_matrix(n, 0.8, 0.25);
    const auto p = oracle::random_vec(n, 3 + n);
    const auto q = oracle::random_vec(n, 4 + n);
    std::vector<double> x(p);
    x.insert(x.end(), q.begin(), q.end());
    const auto ref = oracle::transpose_apply(m, x);
    std::vector<double> tp(n), tq(n);
    scalar_table().upwind_dx_transpose(p, q, 0.8, 4.0, tp, tq);
    for (std::size_t i = 0; i < n; ++i) {
      EXPECT_NEAR(tp[i], ref[i], 1e-13);
      EXPECT_NEAR(tq[i], ref[n + i], 1e-13);
    }
  }
}

TEST(ScalarKernels, RelaxSolveClosedForm) {
  const std::vector<double> rhs{1.0, -2.0, 0.0};
  const std::vector<double> f{3.0, 4.0, -1.0};
  std::vector<double> out(3);
  scalar_table().relax_solve(rhs, f, 2.0, out);
  EXPECT_DOUBLE_EQ(out[0], 7.0 / 3.0);
  EXPECT_DOUBLE_EQ(out[1], 2.0);
  EXPECT_DOUBLE_EQ(out[2], -2.0 / 3.0);
}

TEST(ScalarKernels, Reductions) {
  const std::vector<double> x{1.0, 2.0, 3.0}, y{4.0, -5.0, 6.0};
  EXPECT_DOUBLE_EQ(scalar_table().dot(x, y), 12.0);
  EXPECT_DOUBLE_EQ(scalar_table().sq_dist(x, y), 9.0 + 49.0 + 9.0);
  std::vector<double> z(y);
  scalar_table().axpy(2.0, x, z);
  EXPECT_EQ(z, (std::vector<double>{6.0, -1.0, 12.0}));
}

class Avx2Equivalence : public ::testing::Test {
 protected:
  void SetUp() override {
    simd_ = avx2_table();
    if (!simd_) GTEST_SKIP() << "AVX2 variant not available";
  }
  const KernelTable* simd_ = nullptr;
};

TEST_F(Avx2Equivalence, StencilsAreBitIdentical) {
  for (std::size_t n : kSizes) {
    const auto u = oracle::random_vec(n, 10 + n);
    const auto v = oracle::random_vec(n, 20 + n);
    std::vector<double> a1(n), a2(n), b1(n), b2(n);
    scalar_table().upwind_dx(u, v, 1.3, 7.0, a1, b1);
    simd_->upwind_dx(u, v, 1.3, 7.0, a2, b2);
    EXPECT_EQ(a1, a2) << n;
    EXPECT_EQ(b1, b2) << n;
    scalar_table().upwind_dx_transpose(u, v, 1.3, 7.0, a1, b1);
    simd_->upwind_dx_transpose(u, v, 1.3, 7.0, a2, b2);
    EXPECT_EQ(a1, a2) << n;
    EXPECT_EQ(b1, b2) << n;
  }
}

TEST_F(Avx2Equivalence, ElementwiseAreBitIdentical) {
  for (std::size_t n : kSizes) {
    const auto x = oracle::random_vec(n, 30 + n);
    const auto y = oracle::random_vec(n, 40 + n);
    std::vector<double> o1(n), o2(n);
    scalar_table().relax_solve(x, y, 1e6, o1);
    simd_->relax_solve(x, y, 1e6, o2);
    EXPECT_EQ(o1, o2) << n;
    std::vector<double> z1(y), z2(y);
    scalar_table().axpy(-0.37, x, z1);
    simd_->axpy(-0.37, x, z2);
    EXPECT_EQ(z1, z2) << n;
  }
}

TEST_F(Avx2Equivalence, ReductionsAgreeToRounding) {
  for (std::size_t n : kSizes) {
    const auto x = oracle::random_vec(n, 50 + n);
    const auto y = oracle::random_vec(n, 60 + n);
    const double scale = static_cast<double>(n);
    EXPECT_NEAR(scalar_table().dot(x, y), simd_->dot(x, y), 1e-14 * scale);
    EXPECT_NEAR(scalar_table().sq_dist(x, y), simd_->sq_dist(x, y), 1e-14 * scale);
  }
}

TEST(Dispatch, SelectByName) {
  EXPECT_TRUE(select("scalar"));
  EXPECT_STREQ(active().name, "scalar");
  EXPECT_FALSE(select("sse9"));
  EXPECT_TRUE(select("auto"));
  if (avx2_table()) {
    EXPECT_STREQ(active().name, avx2_table()->name);
  }
}

}  // namespace
}  // namespace relaxopt::kernels

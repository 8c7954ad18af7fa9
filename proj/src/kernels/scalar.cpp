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

#include "kernels/stencil.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt::kernels {
namespace {

void upwind_dx(In u, In v, double a, double inv_dx, Out du, Out dv) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    detail::upwind_cell(u, v, a, inv_dx, i, du, dv);
  }
}

void upwind_dx_transpose(In p, In q, double a, double inv_dx, Out tp,
                         Out tq) {
  const std::size_t n = p.size();
  for (std::size_t i = 0; i < n; ++i) {
    detail::upwind_transpose_cell(p, q, a, inv_dx, i, tp, tq);
  }
}

void relax_solve(In rhs, In f, double k, Out out) {
  const double denom = 1.0 + k;
  for (std::size_t i = 0; i < rhs.size(); ++i) {
    out[i] = (rhs[i] + k * f[i]) / denom;
  }
}

void axpy(double alpha, In x, Out y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

double dot(In x, In y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double sq_dist(In x, In y) {
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",    &upwind_dx, &upwind_dx_transpose,
                                 &relax_solve, &axpy,      &dot,
                                 &sq_dist};
  return table;
}

}  // namespace relaxopt::kernels

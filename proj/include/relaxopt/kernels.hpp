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

#pragma once

// Data-parallel inner loops of the solver. Each kernel has a scalar
// reference implementation; vector variants are chosen at runtime from the
// CPU features. The element-wise kernels and the stencils use the same
// operation order in every variant so results are bit-identical; only the
// reductions (dot, sq_dist) may differ in the last bits.

#include <cstddef>
#include <span>
#include <string_view>

namespace relaxopt::kernels {

using In = std::span<const double>;
using Out = std::span<double>;

struct KernelTable {
  const char* name;

  /// First-order upwind flux difference of g(u, v) = (v, a^2 u) on a
  /// periodic grid, upwinding the characteristic variables v +- a u.
  void (*upwind_dx)(In u, In v, double a, double inv_dx, Out du, Out dv);

  /// Exact transpose of upwind_dx.
  void (*upwind_dx_transpose)(In p, In q, double a, double inv_dx, Out tp,
                              Out tq);

  /// out = (rhs + k f) / (1 + k); the closed-form implicit relaxation solve.
  void (*relax_solve)(In rhs, In f, double k, Out out);

  /// y += alpha x
  void (*axpy)(double alpha, In x, Out y);

  double (*dot)(In x, In y);

  /// sum_i (x_i - y_i)^2
  double (*sq_dist)(In x, In y);
};

const KernelTable& scalar_table();

/// nullptr when not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_table();

/// Table used by the solver. Chosen on first use from RELAXOPT_KERNELS
/// ("scalar", "avx2", "auto"; default auto).
const KernelTable& active();

/// Overrides the active table; returns false if `name` is unavailable.
bool select(std::string_view name);

}  // namespace relaxopt::kernels

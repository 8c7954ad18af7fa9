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

// Per-cell upwind stencils shared by the scalar kernels and by the boundary
// cells of the vector kernels. The vector loops must evaluate exactly these
// expressions in this order.

#include <cstddef>
#include <span>

namespace relaxopt::kernels::detail {

// Interface k+1/2: w+ = v + a u taken from cell k, w- = v - a u from k+1.
inline void upwind_interface(double ul, double vl, double ur, double vr,
                             double a, double& g1, double& g2) {
  const double wp = vl + a * ul;
  const double wm = vr - a * ur;
  g1 = 0.5 * (wp + wm);
  g2 = 0.5 * a * (wp - wm);
}

inline void upwind_cell(std::span<const double> u, std::span<const double> v,
                        double a, double inv_dx, std::size_t i,
                        std::span<double> du, std::span<double> dv) {
  const std::size_t n = u.size();
  const std::size_t im = (i == 0) ? n - 1 : i - 1;
  const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
  double g1r, g2r, g1l, g2l;
  upwind_interface(u[i], v[i], u[ip], v[ip], a, g1r, g2r);
  upwind_interface(u[im], v[im], u[i], v[i], a, g1l, g2l);
  du[i] = (g1r - g1l) * inv_dx;
  dv[i] = (g2r - g2l) * inv_dx;
}

// Contributions of interface k+1/2 to the transposed operator: (hu, hv) go
// to cell k, (hu_next, hv_next) to cell k+1.
inline void upwind_transpose_interface(double pl, double ql, double pr,
                                       double qr, double a, double inv_dx,
                                       double& hu, double& hv,
                                       double& hu_next, double& hv_next) {
  const double dp = (pl - pr) * inv_dx;
  const double dq = (ql - qr) * inv_dx;
  const double adq = a * dq;
  hu = 0.5 * a * (dp + adq);
  hv = 0.5 * (dp + adq);
  hu_next = 0.5 * a * (adq - dp);
  hv_next = 0.5 * (dp - adq);
}

inline void upwind_transpose_cell(std::span<const double> p,
                                  std::span<const double> q, double a,
                                  double inv_dx, std::size_t i,
                                  std::span<double> tp, std::span<double> tq) {
  const std::size_t n = p.size();
  const std::size_t im = (i == 0) ? n - 1 : i - 1;
  const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
  double hu, hv, unused_u, unused_v, prev_u, prev_v, unused_a, unused_b;
  upwind_transpose_interface(p[i], q[i], p[ip], q[ip], a, inv_dx, hu, hv,
                             unused_u, unused_v);
  upwind_transpose_interface(p[im], q[im], p[i], q[i], a, inv_dx, unused_a,
                             unused_b, prev_u, prev_v);
  tp[i] = hu + prev_u;
  tq[i] = hv + prev_v;
}

}  // namespace relaxopt::kernels::detail

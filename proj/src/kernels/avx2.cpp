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

// Built with -mavx2 (no FMA) and only reached after a CPU feature check in
// dispatch.cpp. Products and sums are kept unfused so every lane rounds
// exactly like the scalar reference.

#include <immintrin.h>

#include "kernels/stencil.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt::kernels {
namespace {

constexpr std::size_t kLanes = 4;

void upwind_dx(In u, In v, double a, double inv_dx, Out du, Out dv) {
  const std::size_t n = u.size();
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vhalf = _mm256_set1_pd(0.5);
  const __m256d vhalf_a = _mm256_set1_pd(0.5 * a);
  const __m256d vinv = _mm256_set1_pd(inv_dx);

  detail::upwind_cell(u, v, a, inv_dx, 0, du, dv);
  std::size_t i = 1;
  for (; i + kLanes < n; i += kLanes) {
    const __m256d ul = _mm256_loadu_pd(u.data() + i - 1);
    const __m256d uc = _mm256_loadu_pd(u.data() + i);
    const __m256d ur = _mm256_loadu_pd(u.data() + i + 1);
    const __m256d vl = _mm256_loadu_pd(v.data() + i - 1);
    const __m256d vc = _mm256_loadu_pd(v.data() + i);
    const __m256d vr = _mm256_loadu_pd(v.data() + i + 1);

    const __m256d wp_r = _mm256_add_pd(vc, _mm256_mul_pd(va, uc));
    const __m256d wm_r = _mm256_sub_pd(vr, _mm256_mul_pd(va, ur));
    const __m256d wp_l = _mm256_add_pd(vl, _mm256_mul_pd(va, ul));
    const __m256d wm_l = _mm256_sub_pd(vc, _mm256_mul_pd(va, uc));

    const __m256d g1r = _mm256_mul_pd(vhalf, _mm256_add_pd(wp_r, wm_r));
    const __m256d g2r = _mm256_mul_pd(vhalf_a, _mm256_sub_pd(wp_r, wm_r));
    const __m256d g1l = _mm256_mul_pd(vhalf, _mm256_add_pd(wp_l, wm_l));
    const __m256d g2l = _mm256_mul_pd(vhalf_a, _mm256_sub_pd(wp_l, wm_l));

    _mm256_storeu_pd(du.data() + i, _mm256_mul_pd(_mm256_sub_pd(g1r, g1l), vinv));
    _mm256_storeu_pd(dv.data() + i, _mm256_mul_pd(_mm256_sub_pd(g2r, g2l), vinv));
  }
  for (; i < n; ++i) detail::upwind_cell(u, v, a, inv_dx, i, du, dv);
}

void upwind_dx_transpose(In p, In q, double a, double inv_dx, Out tp,
                         Out tq) {
  const std::size_t n = p.size();
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vhalf = _mm256_set1_pd(0.5);
  const __m256d vhalf_a = _mm256_set1_pd(0.5 * a);
  const __m256d vinv = _mm256_set1_pd(inv_dx);

  detail::upwind_transpose_cell(p, q, a, inv_dx, 0, tp, tq);
  std::size_t i = 1;
  for (; i + kLanes < n; i += kLanes) {
    const __m256d pl = _mm256_loadu_pd(p.data() + i - 1);
    const __m256d pc = _mm256_loadu_pd(p.data() + i);
    const __m256d pr = _mm256_loadu_pd(p.data() + i + 1);
    const __m256d ql = _mm256_loadu_pd(q.data() + i - 1);
    const __m256d qc = _mm256_loadu_pd(q.data() + i);
    const __m256d qr = _mm256_loadu_pd(q.data() + i + 1);

    // interface i+1/2 feeds cell i
    const __m256d dp_r = _mm256_mul_pd(_mm256_sub_pd(pc, pr), vinv);
    const __m256d dq_r = _mm256_mul_pd(_mm256_sub_pd(qc, qr), vinv);
    const __m256d adq_r = _mm256_mul_pd(va, dq_r);
    const __m256d hu = _mm256_mul_pd(vhalf_a, _mm256_add_pd(dp_r, adq_r));
    const __m256d hv = _mm256_mul_pd(vhalf, _mm256_add_pd(dp_r, adq_r));

    // interface i-1/2 feeds cell i as its right neighbour
    const __m256d dp_l = _mm256_mul_pd(_mm256_sub_pd(pl, pc), vinv);
    const __m256d dq_l = _mm256_mul_pd(_mm256_sub_pd(ql, qc), vinv);
    const __m256d adq_l = _mm256_mul_pd(va, dq_l);
    const __m256d hu_prev = _mm256_mul_pd(vhalf_a, _mm256_sub_pd(adq_l, dp_l));
    const __m256d hv_prev = _mm256_mul_pd(vhalf, _mm256_sub_pd(dp_l, adq_l));

    _mm256_storeu_pd(tp.data() + i, _mm256_add_pd(hu, hu_prev));
    _mm256_storeu_pd(tq.data() + i, _mm256_add_pd(hv, hv_prev));
  }
  for (; i < n; ++i) detail::upwind_transpose_cell(p, q, a, inv_dx, i, tp, tq);
}

void relax_solve(In rhs, In f, double k, Out out) {
  const std::size_t n = rhs.size();
  const double denom = 1.0 + k;
  const __m256d vk = _mm256_set1_pd(k);
  const __m256d vden = _mm256_set1_pd(denom);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d r = _mm256_loadu_pd(rhs.data() + i);
    const __m256d fv = _mm256_loadu_pd(f.data() + i);
    _mm256_storeu_pd(out.data() + i,
                     _mm256_div_pd(_mm256_add_pd(r, _mm256_mul_pd(vk, fv)), vden));
  }
  for (; i < n; ++i) out[i] = (rhs[i] + k * f[i]) / denom;
}

void axpy(double alpha, In x, Out y) {
  const std::size_t n = x.size();
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d xv = _mm256_loadu_pd(x.data() + i);
    const __m256d yv = _mm256_loadu_pd(y.data() + i);
    _mm256_storeu_pd(y.data() + i, _mm256_add_pd(yv, _mm256_mul_pd(va, xv)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

double hsum(__m256d v) {
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

double dot(In x, In y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    acc = _mm256_add_pd(acc, _mm256_mul_pd(_mm256_loadu_pd(x.data() + i),
                                           _mm256_loadu_pd(y.data() + i)));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] * y[i];
  return s;
}

double sq_dist(In x, In y) {
  const std::size_t n = x.size();
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= n; i += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x.data() + i),
                                    _mm256_loadu_pd(y.data() + i));
    acc = _mm256_add_pd(acc, _mm256_mul_pd(d, d));
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = x[i] - y[i];
    s += d * d;
  }
  return s;
}

constexpr KernelTable kTable{"avx2",       &upwind_dx, &upwind_dx_transpose,
                             &relax_solve, &axpy,      &dot,
                             &sq_dist};

}  // namespace

namespace detail {
const KernelTable* avx2_table_unchecked() { return &kTable; }
}  // namespace detail

}  // namespace relaxopt::kernels

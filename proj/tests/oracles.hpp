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

// Independent reference implementations used only by the tests. Nothing
// here calls into the library's stencils, kernels or steppers.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

using Vec = std::vector<double>;

inline std::size_t wrap(std::ptrdiff_t i, std::size_t n) {
  const auto m = static_cast<std::ptrdiff_t>(n);
  return static_cast<std::size_t>(((i % m) + m) % m);
}

/// Upwind interface fluxes written in the primitive variables:
///   G1 = (v_k + v_{k+1})/2 + a (u_k - u_{k+1})/2
///   G2 = a (v_k - v_{k+1})/2 + a^2 (u_k + u_{k+1})/2
inline void upwind_dx(const Vec& u, const Vec& v, double a, double dx, Vec& du,
                      Vec& dv) {
  const std::size_t n = u.size();
  Vec g1(n), g2(n);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kp = wrap(static_cast<std::ptrdiff_t>(k) + 1, n);
    g1[k] = 0.5 * (v[k] + v[kp]) + 0.5 * a * (u[k] - u[kp]);
    g2[k] = 0.5 * a * (v[k] - v[kp]) + 0.5 * a * a * (u[k] + u[kp]);
  }
  du.assign(n, 0.0);
  dv.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = wrap(static_cast<std::ptrdiff_t>(i) - 1, n);
    du[i] = (g1[i] - g1[im]) / dx;
    dv[i] = (g2[i] - g2[im]) / dx;
  }
}

/// Dense 2n x 2n matrix of the upwind operator, columns from unit vectors;
/// ordering (u_0..u_{n-1}, v_0..v_{n-1}).
inline std::vector<Vec> upwind_matrix(std::size_t n, double a, double dx) {
  std::vector<Vec> m(2 * n, Vec(2 * n, 0.0));
  for (std::size_t j = 0; j < 2 * n; ++j) {
    Vec u(n, 0.0), v(n, 0.0), du, dv;
    (j < n ? u[j] : v[j - n]) = 1.0;
    upwind_dx(u, v, a, dx, du, dv);
    for (std::size_t i = 0; i < n; ++i) {
      m[i][j] = du[i];
      m[n + i][j] = dv[i];
    }
  }
  return m;
}

/// y = M^T x for a dense square matrix.
inline Vec transpose_apply(const std::vector<Vec>& m, const Vec& x) {
  Vec y(m.size(), 0.0);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) y[j] += m[i][j] * x[i];
  }
  return y;
}

/// Four-line IMEX Euler step: implicit relaxation, then explicit transport
/// evaluated at the relaxed state.
inline void imex_euler_step(Vec& u, Vec& v, double a, double dx, double h,
                            double eps, const std::function<double(double)>& f) {
  const std::size_t n = u.size();
  const double k = h / eps;
  Vec vs(n);
  for (std::size_t i = 0; i < n; ++i) vs[i] = (v[i] + k * f(u[i])) / (1.0 + k);
  Vec du, dv;
  upwind_dx(u, vs, a, dx, du, dv);
  for (std::size_t i = 0; i < n; ++i) {
    u[i] = u[i] - h * du[i];
    v[i] = vs[i] - h * dv[i];
  }
}

/// Backward four-line IMEX Euler step for the costate, with the transport
/// transpose taken from the dense matrix:
///   (p*, q*) = (p, q) - h D^T (p, q)
///   q_n = q* / (1 + h/eps),  p_n = p* + (h/eps) f'(u_n) q_n
inline void imex_euler_adjoint_step(Vec& p, Vec& q, const Vec& u_n, double a,
                                    double dx, double h, double eps,
                                    const std::function<double(double)>& fprime) {
  const std::size_t n = p.size();
  const auto m = upwind_matrix(n, a, dx);
  Vec x(2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = p[i];
    x[n + i] = q[i];
  }
  const Vec t = transpose_apply(m, x);
  for (std::size_t i = 0; i < n; ++i) {
    const double ps = p[i] - h * t[i];
    const double qs = q[i] - h * t[n + i];
    q[i] = qs / (1.0 + h / eps);
    p[i] = ps + (h / eps) * fprime(u_n[i]) * q[i];
  }
}

/// First-order upwind step for u_t + u_x = 0.
inline Vec upwind_advection_step(const Vec& u, double dx, double h) {
  const std::size_t n = u.size();
  Vec out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = u[i] - h / dx * (u[i] - u[wrap(static_cast<std::ptrdiff_t>(i) - 1, n)]);
  }
  return out;
}

inline Vec random_vec(std::size_t n, std::uint64_t seed, double lo = -1.0,
                      double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(lo, hi);
  Vec x(n);
  for (auto& e : x) e = d(rng);
  return x;
}

/// Smooth random periodic field: a few low Fourier modes around `mean`.
inline Vec smooth_random(const Vec& x, std::uint64_t seed, double mean = 0.5,
                         double amp = 0.4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> d(-1.0, 1.0);
  Vec out(x.size(), mean);
  for (int k = 1; k <= 3; ++k) {
    const double c = amp * d(rng) / k;
    const double s = amp * d(rng) / k;
    for (std::size_t i = 0; i < x.size(); ++i) {
      out[i] += c * std::cos(k * x[i]) + s * std::sin(k * x[i]);
    }
  }
  return out;
}

inline double max_abs_diff(const Vec& a, const Vec& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline double max_abs(const Vec& a) {
  double m = 0.0;
  for (double e : a) m = std::max(m, std::abs(e));
  return m;
}

inline double dot(const Vec& a, const Vec& b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

/// Exact rational arithmetic for tableau algebra.
struct Q {
  std::int64_t n = 0;
  std::int64_t d = 1;

  Q() = default;
  Q(std::int64_t num, std::int64_t den = 1) : n(num), d(den) { norm(); }
  void norm() {
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    if (g > 1) {
      n /= g;
      d /= g;
    }
  }
  friend Q operator+(Q a, Q b) { return Q(a.n * b.d + b.n * a.d, a.d * b.d); }
  friend Q operator-(Q a, Q b) { return Q(a.n * b.d - b.n * a.d, a.d * b.d); }
  friend Q operator*(Q a, Q b) { return Q(a.n * b.n, a.d * b.d); }
  friend Q operator/(Q a, Q b) { return Q(a.n * b.d, a.d * b.n); }
  friend bool operator==(Q a, Q b) { return a.n == b.n && a.d == b.d; }
  double value() const { return static_cast<double>(n) / static_cast<double>(d); }
};

using QMat = std::vector<std::vector<Q>>;
using QVec = std::vector<Q>;

/// gamma_i = sum_j (b_j - b_j a~_ji / b~_i) for weights b (gamma) or b~ (gamma~).
inline QVec gamma(const QMat& at, const QVec& bt, const QVec& b) {
  const std::size_t s = b.size();
  QVec g(s);
  for (std::size_t i = 0; i < s; ++i) {
    Q acc(0);
    for (std::size_t j = 0; j < s; ++j) acc = acc + b[j] - b[j] * at[j][i] / bt[i];
    g[i] = acc;
  }
  return g;
}

inline Q weighted(const QVec& w, const QVec& x, const QVec& y) {
  Q acc(0);
  for (std::size_t i = 0; i < w.size(); ++i) acc = acc + w[i] * x[i] * y[i];
  return acc;
}

inline Q tall(const QVec& w, const QMat& m, const QVec& x) {
  Q acc(0);
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = 0; j < w.size(); ++j) acc = acc + w[i] * m[i][j] * x[j];
  }
  return acc;
}

}  // namespace oracle

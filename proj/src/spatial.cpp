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

#include "relaxopt/spatial.hpp"

#include <cmath>

#include "relaxopt/error.hpp"
#include "relaxopt/kernels.hpp"

namespace relaxopt {

Scheme parse_scheme(const std::string& name) {
  if (name == "upwind1") return Scheme::upwind1;
  if (name == "muscl2") return Scheme::muscl2;
  throw InputError("unknown scheme '" + name + "' (known: upwind1, muscl2)");
}

std::string to_string(Scheme s) {
  return s == Scheme::upwind1 ? "upwind1" : "muscl2";
}

namespace {

void prepare(const SpatialOp& op, std::size_t n_in, RelaxState& out) {
  if (n_in != op.grid.n_cells) {
    throw InputError("apply_dx: state size " + std::to_string(n_in) +
                     " does not match grid size " +
                     std::to_string(op.grid.n_cells));
  }
  if (out.u.size() != n_in) out.u.resize(n_in);
  if (out.v.size() != n_in) out.v.resize(n_in);
}

void prepare(const SpatialOp& op, std::size_t n_in, Costate& out) {
  if (n_in != op.grid.n_cells) {
    throw InputError("apply_dx_transpose: costate size " + std::to_string(n_in) +
                     " does not match grid size " +
                     std::to_string(op.grid.n_cells));
  }
  if (out.p.size() != n_in) out.p.resize(n_in);
  if (out.q.size() != n_in) out.q.resize(n_in);
}

Slope minmod_choice(double left, double right) {
  if (!(left * right > 0.0)) return Slope::zero;
  return std::abs(left) <= std::abs(right) ? Slope::left : Slope::right;
}

double slope_value(Slope s, double left, double right) {
  switch (s) {
    case Slope::left:
      return left;
    case Slope::right:
      return right;
    case Slope::zero:
      break;
  }
  return 0.0;
}

}  // namespace

SlopePattern freeze_slopes(const SpatialOp& op, const RelaxState& at) {
  SlopePattern pat;
  if (op.scheme == Scheme::upwind1) return pat;
  const std::size_t n = at.size();
  require_size(at, op.grid.n_cells, "freeze_slopes");
  pat.plus.resize(n);
  pat.minus.resize(n);
  const double a = op.a;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i == 0) ? n - 1 : i - 1;
    const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
    const double wp_m = at.v[im] + a * at.u[im];
    const double wp_c = at.v[i] + a * at.u[i];
    const double wp_p = at.v[ip] + a * at.u[ip];
    const double wm_m = at.v[im] - a * at.u[im];
    const double wm_c = at.v[i] - a * at.u[i];
    const double wm_p = at.v[ip] - a * at.u[ip];
    pat.plus[i] = minmod_choice(wp_c - wp_m, wp_p - wp_c);
    pat.minus[i] = minmod_choice(wm_c - wm_m, wm_p - wm_c);
  }
  return pat;
}

void apply_dx_frozen(const SpatialOp& op, const SlopePattern& pat,
                     const RelaxState& dir, RelaxState& out) {
  prepare(op, dir.size(), out);
  if (pat.plus.empty()) {
    kernels::active().upwind_dx(dir.u, dir.v, op.a, 1.0 / op.grid.dx, out.u,
                                out.v);
    return;
  }
  const std::size_t n = dir.size();
  const double a = op.a;
  const double inv_dx = 1.0 / op.grid.dx;
  std::vector<double> wp(n), wm(n), g1(n), g2(n);
  for (std::size_t i = 0; i < n; ++i) {
    wp[i] = dir.v[i] + a * dir.u[i];
    wm[i] = dir.v[i] - a * dir.u[i];
  }
  auto slope = [&](const std::vector<double>& w, Slope s, std::size_t i) {
    const std::size_t im = (i == 0) ? n - 1 : i - 1;
    const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
    return slope_value(s, w[i] - w[im], w[ip] - w[i]);
  };
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kp = (k + 1 == n) ? 0 : k + 1;
    const double wl = wp[k] + 0.5 * slope(wp, pat.plus[k], k);
    const double wr = wm[kp] - 0.5 * slope(wm, pat.minus[kp], kp);
    g1[k] = 0.5 * (wl + wr);
    g2[k] = 0.5 * a * (wl - wr);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t im = (i == 0) ? n - 1 : i - 1;
    out.u[i] = (g1[i] - g1[im]) * inv_dx;
    out.v[i] = (g2[i] - g2[im]) * inv_dx;
  }
}

void apply_dx(const SpatialOp& op, const RelaxState& state, RelaxState& out) {
  if (state.v.size() != state.u.size()) throw InputError("apply_dx: u/v size mismatch");
  if (op.scheme == Scheme::upwind1) {
    prepare(op, state.size(), out);
    kernels::active().upwind_dx(state.u, state.v, op.a, 1.0 / op.grid.dx, out.u,
                                out.v);
    return;
  }
  apply_dx_frozen(op, freeze_slopes(op, state), state, out);
}

RelaxState apply_dx(const SpatialOp& op, const RelaxState& state) {
  RelaxState out;
  apply_dx(op, state, out);
  return out;
}

void apply_dx_transpose(const SpatialOp& op, const SlopePattern& pat,
                        const Costate& c, Costate& out) {
  if (c.q.size() != c.p.size()) throw InputError("apply_dx_transpose: p/q size mismatch");
  prepare(op, c.size(), out);
  const double a = op.a;
  const double inv_dx = 1.0 / op.grid.dx;
  if (pat.plus.empty()) {
    kernels::active().upwind_dx_transpose(c.p, c.q, a, inv_dx, out.p, out.q);
    return;
  }
  const std::size_t n = c.size();
  // Reverse of: w -> limited interface states -> (G1, G2) -> differences.
  std::vector<double> bar_wp(n, 0.0), bar_wm(n, 0.0);
  std::vector<double> bar_sp(n, 0.0), bar_sm(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t kp = (k + 1 == n) ? 0 : k + 1;
    const double dp = (c.p[k] - c.p[kp]) * inv_dx;
    const double dq = (c.q[k] - c.q[kp]) * inv_dx;
    const double bar_wl = 0.5 * dp + 0.5 * a * dq;
    const double bar_wr = 0.5 * dp - 0.5 * a * dq;
    bar_wp[k] += bar_wl;
    bar_sp[k] += 0.5 * bar_wl;
    bar_wm[kp] += bar_wr;
    bar_sm[kp] -= 0.5 * bar_wr;
  }
  auto scatter_slope = [&](std::vector<double>& bar_w, const std::vector<double>& bar_s,
                           const std::vector<Slope>& sel) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t im = (i == 0) ? n - 1 : i - 1;
      const std::size_t ip = (i + 1 == n) ? 0 : i + 1;
      switch (sel[i]) {
        case Slope::left:
          bar_w[i] += bar_s[i];
          bar_w[im] -= bar_s[i];
          break;
        case Slope::right:
          bar_w[ip] += bar_s[i];
          bar_w[i] -= bar_s[i];
          break;
        case Slope::zero:
          break;
      }
    }
  };
  scatter_slope(bar_wp, bar_sp, pat.plus);
  scatter_slope(bar_wm, bar_sm, pat.minus);
  for (std::size_t i = 0; i < n; ++i) {
    out.p[i] = a * (bar_wp[i] - bar_wm[i]);
    out.q[i] = bar_wp[i] + bar_wm[i];
  }
}

void apply_dx_transpose(const SpatialOp& op, const Costate& c, Costate& out) {
  if (op.scheme != Scheme::upwind1) {
    throw InputError("apply_dx_transpose: muscl2 needs a frozen slope pattern");
  }
  apply_dx_transpose(op, SlopePattern{}, c, out);
}

Costate apply_dx_transpose(const SpatialOp& op, const Costate& c) {
  Costate out;
  apply_dx_transpose(op, c, out);
  return out;
}

}  // namespace relaxopt

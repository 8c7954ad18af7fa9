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

// Domain types shared by every solver stage: the periodic grid, scalar flux
// models, the (u, v) relaxation state and its costate (p, q).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace relaxopt {

using Field = std::vector<double>;

/// Uniform periodic mesh on [x_min, x_max); cell n_cells-1 neighbours cell 0.
struct Grid {
  double x_min = 0.0;
  double x_max = 1.0;
  std::size_t n_cells = 0;
  double dx = 0.0;
  std::vector<double> centers;

  std::size_t size() const { return n_cells; }
};

Grid make_grid(double x_min, double x_max, std::size_t n_cells);

/// Scalar flux f(u) and its analytic derivative.
struct FluxModel {
  std::function<double(double)> flux;
  std::function<double(double)> flux_deriv;
  std::string name;
};

FluxModel burgers_model();
FluxModel linear_advection_model(double speed);
/// Lookup by name: "burgers" or "linear" (unit speed).
FluxModel flux_model_by_name(const std::string& name);

/// Cell fields of the relaxation system: u conserved, v relaxes to f(u).
struct RelaxState {
  Field u;
  Field v;

  RelaxState() = default;
  explicit RelaxState(std::size_t n) : u(n, 0.0), v(n, 0.0) {}
  RelaxState(Field u_, Field v_) : u(std::move(u_)), v(std::move(v_)) {}

  std::size_t size() const { return u.size(); }
};

/// Adjoint variables: p pairs with u, q pairs with v.
struct Costate {
  Field p;
  Field q;

  Costate() = default;
  explicit Costate(std::size_t n) : p(n, 0.0), q(n, 0.0) {}
  Costate(Field p_, Field q_) : p(std::move(p_)), q(std::move(q_)) {}

  std::size_t size() const { return p.size(); }
};

struct RelaxConfig {
  double epsilon = 1e-6;
  double safety = 1.2;
  double a_floor = 0.1;
  /// When set, used verbatim instead of the subcharacteristic estimate.
  std::optional<double> speed;
};

void validate(const RelaxConfig& cfg);

/// a = max(a_floor, safety * max_i |f'(u_i)|).
double subchar_speed(const FluxModel& model, std::span<const double> u,
                     const RelaxConfig& cfg);

/// u = u0, v = f(u0).
RelaxState relax_init(std::span<const double> u0, const FluxModel& model);

void require_size(const RelaxState& s, std::size_t n, const char* what);
void require_size(const Costate& s, std::size_t n, const char* what);
bool all_finite(std::span<const double> x);

}  // namespace relaxopt

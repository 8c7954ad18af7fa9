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

#include "relaxopt/core.hpp"

#include <algorithm>
#include <cmath>

#include "relaxopt/error.hpp"

namespace relaxopt {

Grid make_grid(double x_min, double x_max, std::size_t n_cells) {
  if (n_cells < 2) {
    throw InputError("grid needs at least 2 cells, got " +
                     std::to_string(n_cells));
  }
  if (!std::isfinite(x_min) || !std::isfinite(x_max) || !(x_max > x_min)) {
    throw InputError("degenerate grid interval");
  }
  Grid g;
  g.x_min = x_min;
  g.x_max = x_max;
  g.n_cells = n_cells;
  g.dx = (x_max - x_min) / static_cast<double>(n_cells);
  g.centers.resize(n_cells);
  for (std::size_t i = 0; i < n_cells; ++i) {
    g.centers[i] = x_min + (static_cast<double>(i) + 0.5) * g.dx;
  }
  return g;
}

FluxModel burgers_model() {
  return {[](double u) { return 0.5 * u * u; }, [](double u) { return u; },
          "burgers"};
}

FluxModel linear_advection_model(double speed) {
  return {[speed](double u) { return speed * u; },
          [speed](double) { return speed; }, "linear"};
}

FluxModel flux_model_by_name(const std::string& name) {
  if (name == "burgers") return burgers_model();
  if (name == "linear") return linear_advection_model(1.0);
  throw RegistryError("unknown flux model '" + name +
                      "' (known: burgers, linear)");
}

void validate(const RelaxConfig& cfg) {
  if (!(cfg.epsilon > 0.0) || !std::isfinite(cfg.epsilon)) {
    throw InputError("epsilon must be positive");
  }
  if (!(cfg.safety >= 1.0) || !std::isfinite(cfg.safety)) {
    throw InputError("safety must be >= 1");
  }
  if (!(cfg.a_floor > 0.0) || !std::isfinite(cfg.a_floor)) {
    throw InputError("a_floor must be positive");
  }
  if (cfg.speed && (!(*cfg.speed > 0.0) || !std::isfinite(*cfg.speed))) {
    throw InputError("fixed speed must be positive");
  }
}

double subchar_speed(const FluxModel& model, std::span<const double> u,
                     const RelaxConfig& cfg) {
  if (u.empty()) throw InputError("subchar_speed: empty field");
  double max_speed = 0.0;
  for (double ui : u) {
    if (!std::isfinite(ui)) throw InputError("subchar_speed: non-finite u");
    max_speed = std::max(max_speed, std::abs(model.flux_deriv(ui)));
  }
  return std::max(cfg.a_floor, cfg.safety * max_speed);
}

RelaxState relax_init(std::span<const double> u0, const FluxModel& model) {
  RelaxState s(u0.size());
  std::copy(u0.begin(), u0.end(), s.u.begin());
  std::transform(u0.begin(), u0.end(), s.v.begin(), model.flux);
  return s;
}

void require_size(const RelaxState& s, std::size_t n, const char* what) {
  if (s.u.size() != n || s.v.size() != n) {
    throw InputError(std::string(what) + ": state size mismatch (expected " +
                     std::to_string(n) + ")");
  }
}

void require_size(const Costate& s, std::size_t n, const char* what) {
  if (s.p.size() != n || s.q.size() != n) {
    throw InputError(std::string(what) + ": costate size mismatch (expected " +
                     std::to_string(n) + ")");
  }
}

bool all_finite(std::span<const double> x) {
  return std::all_of(x.begin(), x.end(),
                     [](double v) { return std::isfinite(v); });
}

}  // namespace relaxopt

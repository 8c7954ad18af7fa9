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

// Discrete flux divergence D_x g(y) of the linear transport part
// g(u, v) = (v, a^2 u), built by upwinding the characteristic variables
// w+ = v + a u (speed +a) and w- = v - a u (speed -a) on a periodic grid.
// Interface k+1/2 takes w+ from cell k and w- from cell k+1.

#include <cstdint>
#include <string>
#include <vector>

#include "relaxopt/core.hpp"

namespace relaxopt {

enum class Scheme { upwind1, muscl2 };
enum class Limiter { minmod };

Scheme parse_scheme(const std::string& name);
std::string to_string(Scheme s);

struct SpatialOp {
  Grid grid;
  double a = 1.0;
  Scheme scheme = Scheme::upwind1;
  Limiter limiter = Limiter::minmod;
};

/// Which one-sided difference the minmod limiter picked in each cell.
enum class Slope : std::uint8_t { zero, left, right };

/// Limiter decisions for w+ and w-, frozen at a linearisation state.
/// Empty for upwind1.
struct SlopePattern {
  std::vector<Slope> plus;
  std::vector<Slope> minus;
};

/// Returns D_x g(state). Size mismatch throws InputError.
RelaxState apply_dx(const SpatialOp& op, const RelaxState& state);
void apply_dx(const SpatialOp& op, const RelaxState& state, RelaxState& out);

/// minmod(l, r): zero unless l r > 0, then the smaller magnitude; ties
/// pick the left difference.
SlopePattern freeze_slopes(const SpatialOp& op, const RelaxState& at);

/// Linear operator with the limiter frozen. For muscl2,
/// apply_dx_frozen(freeze_slopes(y), y) reproduces apply_dx(y) bit for bit.
void apply_dx_frozen(const SpatialOp& op, const SlopePattern& pattern,
                     const RelaxState& dir, RelaxState& out);

/// Exact transpose of the upwind1 operator.
Costate apply_dx_transpose(const SpatialOp& op, const Costate& costate);
void apply_dx_transpose(const SpatialOp& op, const Costate& costate,
                        Costate& out);

/// Transpose of the frozen-limiter operator (falls back to the upwind1
/// transpose when the pattern is empty).
void apply_dx_transpose(const SpatialOp& op, const SlopePattern& pattern,
                        const Costate& costate, Costate& out);

}  // namespace relaxopt

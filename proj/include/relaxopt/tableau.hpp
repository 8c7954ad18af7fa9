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

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace relaxopt {

/// Small dense row-major matrix for Butcher coefficients.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const {
    return data_[i * cols_ + j];
  }
  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Explicit/implicit Butcher pair. The explicit matrix is strictly lower
/// triangular, the implicit one lower triangular (diagonally implicit).
struct ImexTableau {
  std::string name;
  std::size_t s = 0;
  Matrix a_tilde;
  Matrix a_impl;
  std::vector<double> w_tilde;
  std::vector<double> w;
  std::vector<double> c_tilde;
  std::vector<double> c;
};

/// Validates the triangular structure and fills the abscissae.
ImexTableau make_tableau(std::string name, Matrix a_tilde, Matrix a_impl,
                         std::vector<double> w_tilde, std::vector<double> w);

/// Coefficients of the transformed adjoint scheme:
///   alpha~_ij = w~_j - (w~_j / w~_i) a~_ji     alpha_ij = w_j - (w_j / w~_i) a~_ji
///   beta~_ij  = w~_j - (w~_j / w_i)  a_ji      beta_ij  = w_j - (w_j / w_i)  a_ji
/// and their row sums gamma~, gamma, delta~, delta.
struct AdjointCoeffs {
  Matrix alpha_tilde;
  Matrix alpha;
  Matrix beta_tilde;
  Matrix beta;
  std::vector<double> gamma;
  std::vector<double> gamma_tilde;
  std::vector<double> delta;
  std::vector<double> delta_tilde;
};

/// Throws ZeroWeightError when any weight vanishes.
AdjointCoeffs adjoint_coeffs(const ImexTableau& tab);

struct ConditionResidual {
  std::string label;
  int order = 0;
  double residual = 0.0;
};

struct OrderReport {
  int forward_order = 0;
  int adjoint_system_order = 0;
  /// Forward conditions of orders 1-3 followed by the third-order adjoint
  /// branch conditions (order 3, labels prefixed "adjoint:").
  std::vector<ConditionResidual> condition_residuals;
  /// delta / delta~ moments; reported, never used to decide the order.
  std::vector<ConditionResidual> informational;
  std::string branch_used;
  bool coeffs_available = false;
};

constexpr double kDefaultOrderTol = 1e-12;

OrderReport check_order(const ImexTableau& tab, const AdjointCoeffs& coeffs,
                        double tol = kDefaultOrderTol);

/// Derives the adjoint coefficients itself; a zero weight leaves the
/// third-order adjoint branch unevaluated.
OrderReport check_order(const ImexTableau& tab, double tol = kDefaultOrderTol);

/// Registered pairs: imex-euler, ars-222, ars-443, bpr-343, ssp2-222,
/// kutta-dirk-3, ralston-dirk-3.
ImexTableau builtin_tableau(const std::string& name);
std::vector<std::string> builtin_tableau_names();
/// Forward order each builtin is registered with.
int builtin_claimed_order(const std::string& name);

/// Text format: s, then s rows of a~, s rows of a, one row w~, one row w.
/// Entries are decimals or p/q rationals; '#' starts a comment.
ImexTableau parse_tableau(const std::string& text, std::string name);
ImexTableau load_tableau_file(const std::filesystem::path& path);
std::string format_tableau(const ImexTableau& tab);

/// Builtin name or path to a tableau file.
ImexTableau resolve_tableau(const std::string& name_or_path);

}  // namespace relaxopt

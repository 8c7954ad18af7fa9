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

#include "relaxopt/tableau.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "relaxopt/error.hpp"

namespace relaxopt {

ImexTableau make_tableau(std::string name, Matrix a_tilde, Matrix a_impl,
                         std::vector<double> w_tilde, std::vector<double> w) {
  const std::size_t s = w.size();
  if (s == 0) throw InputError("tableau '" + name + "' has no stages");
  if (w_tilde.size() != s || a_tilde.rows() != s || a_tilde.cols() != s ||
      a_impl.rows() != s || a_impl.cols() != s) {
    throw InputError("tableau '" + name + "': inconsistent stage counts");
  }
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      const double at = a_tilde(i, j);
      const double ai = a_impl(i, j);
      if (!std::isfinite(at) || !std::isfinite(ai)) {
        throw InputError("tableau '" + name + "': non-finite coefficient");
      }
      if (j >= i && at != 0.0) {
        throw InputError("tableau '" + name +
                         "': explicit matrix must be strictly lower triangular");
      }
      if (j > i && ai != 0.0) {
        throw InputError("tableau '" + name +
                         "': implicit matrix must be lower triangular");
      }
    }
  }
  ImexTableau tab;
  tab.name = std::move(name);
  tab.s = s;
  tab.c_tilde.assign(s, 0.0);
  tab.c.assign(s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      tab.c_tilde[i] += a_tilde(i, j);
      tab.c[i] += a_impl(i, j);
    }
  }
  tab.a_tilde = std::move(a_tilde);
  tab.a_impl = std::move(a_impl);
  tab.w_tilde = std::move(w_tilde);
  tab.w = std::move(w);
  return tab;
}

AdjointCoeffs adjoint_coeffs(const ImexTableau& tab) {
  const std::size_t s = tab.s;
  for (std::size_t i = 0; i < s; ++i) {
    if (tab.w_tilde[i] == 0.0) throw ZeroWeightError("w_tilde", i);
    if (tab.w[i] == 0.0) throw ZeroWeightError("w", i);
  }
  AdjointCoeffs co{Matrix(s, s), Matrix(s, s), Matrix(s, s), Matrix(s, s),
                   std::vector<double>(s, 0.0), std::vector<double>(s, 0.0),
                   std::vector<double>(s, 0.0), std::vector<double>(s, 0.0)};
  const auto& at = tab.a_tilde;
  const auto& ai = tab.a_impl;
  const auto& wt = tab.w_tilde;
  const auto& w = tab.w;
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = 0; j < s; ++j) {
      co.alpha_tilde(i, j) = wt[j] - (wt[j] / wt[i]) * at(j, i);
      co.alpha(i, j) = w[j] - (w[j] / wt[i]) * at(j, i);
      co.beta_tilde(i, j) = wt[j] - (wt[j] / w[i]) * ai(j, i);
      co.beta(i, j) = w[j] - (w[j] / w[i]) * ai(j, i);
    }
    for (std::size_t j = 0; j < s; ++j) {
      co.gamma[i] += co.alpha(i, j);
      co.gamma_tilde[i] += co.alpha_tilde(i, j);
      co.delta[i] += co.beta(i, j);
      co.delta_tilde[i] += co.beta_tilde(i, j);
    }
  }
  return co;
}

namespace {

using Vec = std::vector<double>;

double weighted(const Vec& b, const Vec& x, const Vec& y) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * x[i] * y[i];
  return s;
}

double weighted(const Vec& b, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) s += b[i] * x[i];
  return s;
}

// sum_ij b_i M_ij x_j
double tall(const Vec& b, const Matrix& m, const Vec& x) {
  double s = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) s += b[i] * m(i, j) * x[j];
  }
  return s;
}

std::vector<ConditionResidual> forward_conditions(const ImexTableau& tab) {
  const Vec ones(tab.s, 1.0);
  struct Named {
    const Vec* v;
    const char* label;
  };
  const Named weights[] = {{&tab.w_tilde, "w~"}, {&tab.w, "w"}};
  const Named abscissae[] = {{&tab.c_tilde, "c~"}, {&tab.c, "c"}};
  struct NamedMatrix {
    const Matrix* m;
    const char* label;
  };
  const NamedMatrix mats[] = {{&tab.a_tilde, "A~"}, {&tab.a_impl, "A"}};

  std::vector<ConditionResidual> out;
  for (const auto& b : weights) {
    out.push_back({std::string("sum ") + b.label + " = 1", 1,
                   std::abs(weighted(*b.v, ones) - 1.0)});
  }
  for (const auto& b : weights) {
    for (const auto& c : abscissae) {
      out.push_back({std::string("sum ") + b.label + " " + c.label + " = 1/2", 2,
                     std::abs(weighted(*b.v, *c.v) - 0.5)});
    }
  }
  for (const auto& b : weights) {
    for (std::size_t p = 0; p < 2; ++p) {
      for (std::size_t q = p; q < 2; ++q) {
        out.push_back({std::string("sum ") + b.label + " " + abscissae[p].label +
                           " " + abscissae[q].label + " = 1/3",
                       3,
                       std::abs(weighted(*b.v, *abscissae[p].v, *abscissae[q].v) -
                                1.0 / 3.0)});
      }
    }
    for (const auto& m : mats) {
      for (const auto& c : abscissae) {
        out.push_back({std::string("sum ") + b.label + " " + m.label + " " +
                           c.label + " = 1/6",
                       3, std::abs(tall(*b.v, *m.m, *c.v) - 1.0 / 6.0)});
      }
    }
  }
  return out;
}

int order_from(const std::vector<ConditionResidual>& conds, double tol) {
  int order = 0;
  for (int k = 1; k <= 3; ++k) {
    bool ok = true;
    for (const auto& c : conds) {
      if (c.order == k && !(c.residual <= tol)) ok = false;
    }
    if (!ok) break;
    order = k;
  }
  return order;
}

}  // namespace

namespace {

struct BranchResult {
  std::vector<ConditionResidual> residuals;
  std::vector<ConditionResidual> informational;
  std::string branch;
  bool satisfied = false;
};

BranchResult third_order_branches(const ImexTableau& tab,
                                  const AdjointCoeffs& co, double tol) {
  const Vec& w = tab.w;
  const Vec& g = co.gamma;
  const Vec& gt = co.gamma_tilde;
  BranchResult r;
  auto add = [&](const std::string& label, double value, double target) {
    const double res = std::abs(value - target);
    r.residuals.push_back({"adjoint: " + label, 3, res});
    return res <= tol;
  };
  const bool g1 = add("sum w gamma^2 = 1/3", weighted(w, g, g), 1.0 / 3.0);
  const bool g2 = add("sum w gamma~^2 = 1/3", weighted(w, gt, gt), 1.0 / 3.0);
  const bool g3 = add("sum w gamma gamma~ = 1/3", weighted(w, g, gt), 1.0 / 3.0);
  const bool c1 = add("sum w A gamma = 1/6", tall(w, tab.a_impl, g), 1.0 / 6.0);
  const bool c2 = add("sum w A~ gamma~ = 1/6", tall(w, tab.a_tilde, gt), 1.0 / 6.0);
  const bool c3 = add("sum w A gamma~ = 1/6", tall(w, tab.a_impl, gt), 1.0 / 6.0);
  const bool c4 = add("sum w A~ gamma = 1/6", tall(w, tab.a_tilde, g), 1.0 / 6.0);

  const Vec& d = co.delta;
  const Vec& dt = co.delta_tilde;
  r.informational.push_back({"sum w delta^2", 3, weighted(w, d, d)});
  r.informational.push_back({"sum w delta~^2", 3, weighted(w, dt, dt)});
  r.informational.push_back({"sum w delta delta~", 3, weighted(w, d, dt)});

  if (g1 && g2 && g3) {
    r.satisfied = true;
    r.branch = "gamma moments";
  } else if (c1 && c2 && (c3 || c4)) {
    r.satisfied = true;
    r.branch = c3 ? "coupling (A gamma~)" : "coupling (A~ gamma)";
  } else {
    r.branch = "none: third-order adjoint conditions violated";
  }
  return r;
}

}  // namespace

namespace {

OrderReport check_order_impl(const ImexTableau& tab, const AdjointCoeffs* co,
                             double tol) {
  OrderReport rep;
  rep.condition_residuals = forward_conditions(tab);
  rep.forward_order = order_from(rep.condition_residuals, tol);
  rep.coeffs_available = co != nullptr;

  if (co) {
    BranchResult br = third_order_branches(tab, *co, tol);
    rep.condition_residuals.insert(rep.condition_residuals.end(),
                                   br.residuals.begin(), br.residuals.end());
    rep.informational = std::move(br.informational);
    if (rep.forward_order < 3) {
      rep.adjoint_system_order = rep.forward_order;
      rep.branch_used = "inherits forward order";
    } else if (br.satisfied) {
      rep.adjoint_system_order = 3;
      rep.branch_used = br.branch;
    } else {
      rep.adjoint_system_order = 2;
      rep.branch_used = br.branch;
    }
  } else if (rep.forward_order < 3) {
    rep.adjoint_system_order = rep.forward_order;
    rep.branch_used = "inherits forward order";
  } else {
    rep.adjoint_system_order = 2;
    rep.branch_used = "not evaluable: zero weight";
  }
  return rep;
}

}  // namespace

OrderReport check_order(const ImexTableau& tab, const AdjointCoeffs& coeffs,
                        double tol) {
  return check_order_impl(tab, &coeffs, tol);
}

OrderReport check_order(const ImexTableau& tab, double tol) {
  try {
    const AdjointCoeffs co = adjoint_coeffs(tab);
    return check_order_impl(tab, &co, tol);
  } catch (const ZeroWeightError&) {
    return check_order_impl(tab, nullptr, tol);
  }
}

// ---------------------------------------------------------------------------
// Registry

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> init) {
  Matrix m(init.size(), init.size());
  std::size_t i = 0;
  for (const auto& row : init) {
    std::size_t j = 0;
    for (double x : row) m(i, j++) = x;
    ++i;
  }
  return m;
}

struct Entry {
  int order;
  ImexTableau (*build)();
};

ImexTableau imex_euler() {
  return make_tableau("imex-euler", rows({{0.0}}), rows({{1.0}}), {1.0}, {1.0});
}

// Ascher, Ruuth & Spiteri (2,2,2); first stage explicit in both parts.
ImexTableau ars_222() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  const double d = 1.0 - 1.0 / (2.0 * g);
  return make_tableau("ars-222",
                      rows({{0, 0, 0}, {g, 0, 0}, {d, 1 - d, 0}}),
                      rows({{0, 0, 0}, {0, g, 0}, {0, 1 - g, g}}),
                      {d, 1 - d, 0}, {0, 1 - g, g});
}

// Ascher, Ruuth & Spiteri (4,4,3).
ImexTableau ars_443() {
  return make_tableau(
      "ars-443",
      rows({{0, 0, 0, 0, 0},
            {1.0 / 2, 0, 0, 0, 0},
            {11.0 / 18, 1.0 / 18, 0, 0, 0},
            {5.0 / 6, -5.0 / 6, 1.0 / 2, 0, 0},
            {1.0 / 4, 7.0 / 4, 3.0 / 4, -7.0 / 4, 0}}),
      rows({{0, 0, 0, 0, 0},
            {0, 1.0 / 2, 0, 0, 0},
            {0, 1.0 / 6, 1.0 / 2, 0, 0},
            {0, -1.0 / 2, 1.0 / 2, 1.0 / 2, 0},
            {0, 3.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2}}),
      {1.0 / 4, 7.0 / 4, 3.0 / 4, -7.0 / 4, 0},
      {0, 3.0 / 2, -3.0 / 2, 1.0 / 2, 1.0 / 2});
}

// Boscarino, Pareschi & Russo (3,4,3); globally stiffly accurate.
ImexTableau bpr_343() {
  return make_tableau(
      "bpr-343",
      rows({{0, 0, 0, 0, 0},
            {1, 0, 0, 0, 0},
            {4.0 / 9, 2.0 / 9, 0, 0, 0},
            {1.0 / 4, 0, 3.0 / 4, 0, 0},
            {1.0 / 4, 0, 3.0 / 4, 0, 0}}),
      rows({{0, 0, 0, 0, 0},
            {1.0 / 2, 1.0 / 2, 0, 0, 0},
            {5.0 / 18, -1.0 / 9, 1.0 / 2, 0, 0},
            {1.0 / 2, 0, 0, 1.0 / 2, 0},
            {1.0 / 4, 0, 3.0 / 4, -1.0 / 2, 1.0 / 2}}),
      {1.0 / 4, 0, 3.0 / 4, 0, 0}, {1.0 / 4, 0, 3.0 / 4, -1.0 / 2, 1.0 / 2});
}

// Pareschi & Russo SSP2(2,2,2); all weights nonzero.
ImexTableau ssp2_222() {
  const double g = 1.0 - 1.0 / std::sqrt(2.0);
  return make_tableau("ssp2-222", rows({{0, 0}, {1, 0}}),
                      rows({{g, 0}, {1 - 2 * g, g}}), {0.5, 0.5}, {0.5, 0.5});
}

// Kutta's third-order explicit method paired with a DIRK sharing its weights
// and abscissae. All weights are nonzero and the gamma moments equal 1/3.
ImexTableau kutta_dirk_3() {
  return make_tableau("kutta-dirk-3",
                      rows({{0, 0, 0}, {1.0 / 2, 0, 0}, {-1, 2, 0}}),
                      rows({{0, 0, 0}, {1.0 / 4, 1.0 / 4, 0}, {1.0 / 4, 1.0 / 2, 1.0 / 4}}),
                      {1.0 / 6, 2.0 / 3, 1.0 / 6}, {1.0 / 6, 2.0 / 3, 1.0 / 6});
}

// Ralston's third-order explicit method with a matching DIRK. Third order
// forward, but both third-order adjoint branches fail.
ImexTableau ralston_dirk_3() {
  return make_tableau("ralston-dirk-3",
                      rows({{0, 0, 0}, {1.0 / 2, 0, 0}, {0, 3.0 / 4, 0}}),
                      rows({{0, 0, 0}, {1.0 / 4, 1.0 / 4, 0}, {5.0 / 16, 3.0 / 16, 1.0 / 4}}),
                      {2.0 / 9, 1.0 / 3, 4.0 / 9}, {2.0 / 9, 1.0 / 3, 4.0 / 9});
}

const std::map<std::string, Entry>& registry() {
  static const std::map<std::string, Entry> reg{
      {"imex-euler", {1, &imex_euler}},     {"ars-222", {2, &ars_222}},
      {"ars-443", {3, &ars_443}},           {"bpr-343", {3, &bpr_343}},
      {"ssp2-222", {2, &ssp2_222}},         {"kutta-dirk-3", {3, &kutta_dirk_3}},
      {"ralston-dirk-3", {3, &ralston_dirk_3}},
  };
  return reg;
}

std::string known_names() {
  std::string out;
  for (const auto& [name, entry] : registry()) {
    if (!out.empty()) out += ", ";
    out += name;
  }
  return out;
}

}  // namespace

ImexTableau builtin_tableau(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) {
    throw RegistryError("unknown tableau '" + name + "' (known: " + known_names() +
                        ")");
  }
  ImexTableau tab = it->second.build();
  const OrderReport rep = check_order(tab);
  if (rep.forward_order != it->second.order) {
    throw RegistryError("tableau '" + name + "' fails its order " +
                        std::to_string(it->second.order) + " conditions");
  }
  return tab;
}

std::vector<std::string> builtin_tableau_names() {
  std::vector<std::string> out;
  for (const auto& [name, entry] : registry()) out.push_back(name);
  return out;
}

int builtin_claimed_order(const std::string& name) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw RegistryError("unknown tableau '" + name + "'");
  return it->second.order;
}

// ---------------------------------------------------------------------------
// Text format

namespace {

double parse_number(std::string_view tok, std::size_t line) {
  const auto slash = tok.find('/');
  if (slash == std::string_view::npos) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
      throw ParseError(line, "bad number '" + std::string(tok) + "'");
    }
    return v;
  }
  auto parse_int = [&](std::string_view s) {
    long long v = 0;
    const char* begin = s.data();
    if (!s.empty() && s.front() == '+') ++begin;
    const auto [ptr, ec] = std::from_chars(begin, s.data() + s.size(), v);
    if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
      throw ParseError(line, "bad rational '" + std::string(tok) + "'");
    }
    return v;
  };
  const long long num = parse_int(tok.substr(0, slash));
  const long long den = parse_int(tok.substr(slash + 1));
  if (den == 0) throw ParseError(line, "zero denominator in '" + std::string(tok) + "'");
  constexpr long long kExact = 1LL << 53;
  if (std::llabs(num) > kExact || std::llabs(den) > kExact) {
    throw ParseError(line, "rational component exceeds 2^53 in '" +
                               std::string(tok) + "'");
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

struct Line {
  std::size_t number;
  std::vector<std::string> tokens;
};

std::vector<Line> significant_lines(const std::string& text) {
  std::vector<Line> out;
  std::istringstream in(text);
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (const auto hash = raw.find('#'); hash != std::string::npos) raw.resize(hash);
    std::istringstream ls(raw);
    Line l{number, {}};
    std::string tok;
    while (ls >> tok) l.tokens.push_back(tok);
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

}  // namespace

ImexTableau parse_tableau(const std::string& text, std::string name) {
  const auto lines = significant_lines(text);
  if (lines.empty()) throw ParseError(1, "empty tableau file");

  const Line& head = lines.front();
  std::size_t s = 0;
  {
    const std::string& tok = head.tokens.front();
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), s);
    if (head.tokens.size() != 1 || ec != std::errc() ||
        ptr != tok.data() + tok.size() || s == 0 || s > 64) {
      throw ParseError(head.number, "expected stage count");
    }
  }
  const std::size_t expected = 1 + 2 * s + 2;
  // Report the first malformed row before complaining about missing ones.
  for (std::size_t k = 1; k < std::min(lines.size(), expected); ++k) {
    if (lines[k].tokens.size() != s) {
      throw ParseError(lines[k].number, "expected " + std::to_string(s) +
                                            " entries, found " +
                                            std::to_string(lines[k].tokens.size()));
    }
  }
  if (lines.size() < expected) {
    const std::size_t at = lines.back().number + 1;
    throw ParseError(at, "truncated tableau: expected " + std::to_string(expected) +
                             " rows, found " + std::to_string(lines.size()));
  }
  if (lines.size() > expected) {
    throw ParseError(lines[expected].number, "unexpected trailing row");
  }

  auto row = [&](const Line& l) {
    if (l.tokens.size() != s) {
      throw ParseError(l.number, "expected " + std::to_string(s) + " entries, found " +
                                     std::to_string(l.tokens.size()));
    }
    std::vector<double> out;
    for (const auto& t : l.tokens) out.push_back(parse_number(t, l.number));
    return out;
  };

  Matrix at(s, s), ai(s, s);
  for (std::size_t i = 0; i < s; ++i) {
    const auto r = row(lines[1 + i]);
    for (std::size_t j = 0; j < s; ++j) at(i, j) = r[j];
  }
  for (std::size_t i = 0; i < s; ++i) {
    const auto r = row(lines[1 + s + i]);
    for (std::size_t j = 0; j < s; ++j) ai(i, j) = r[j];
  }
  auto wt = row(lines[1 + 2 * s]);
  auto w = row(lines[2 + 2 * s]);
  try {
    return make_tableau(std::move(name), std::move(at), std::move(ai), std::move(wt),
                        std::move(w));
  } catch (const InputError& e) {
    throw ParseError(head.number, e.what());
  }
}

ImexTableau load_tableau_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open tableau file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_tableau(buf.str(), path.stem().string());
}

std::string format_tableau(const ImexTableau& tab) {
  std::string out = "# " + tab.name + "\n" + std::to_string(tab.s) + "\n";
  char num[40];
  auto emit_row = [&](auto get) {
    for (std::size_t j = 0; j < tab.s; ++j) {
      std::snprintf(num, sizeof num, "%.17g", get(j));
      out += (j ? " " : "");
      out += num;
    }
    out += "\n";
  };
  for (std::size_t i = 0; i < tab.s; ++i) emit_row([&](std::size_t j) { return tab.a_tilde(i, j); });
  for (std::size_t i = 0; i < tab.s; ++i) emit_row([&](std::size_t j) { return tab.a_impl(i, j); });
  emit_row([&](std::size_t j) { return tab.w_tilde[j]; });
  emit_row([&](std::size_t j) { return tab.w[j]; });
  return out;
}

ImexTableau resolve_tableau(const std::string& name_or_path) {
  if (registry().count(name_or_path)) return builtin_tableau(name_or_path);
  if (std::filesystem::exists(name_or_path)) return load_tableau_file(name_or_path);
  return builtin_tableau(name_or_path);  // throws with the registry listing
}

}  // namespace relaxopt

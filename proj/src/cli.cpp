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

#include "relaxopt/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <random>
#include <sstream>

#include "relaxopt/adjoint.hpp"
#include "relaxopt/forward.hpp"
#include "relaxopt/optimize.hpp"
#include "relaxopt/studies.hpp"
#include "relaxopt/tableau.hpp"

namespace relaxopt {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError(key, "expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t to_uint(const std::string& key, const std::string& s) {
  std::uint64_t v = 0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc{} || r.ptr != s.data() + s.size()) {
    throw ConfigError(key, "expected a non-negative integer, got '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  return os.str();
}

struct KeySpec {
  std::function<void(RunConfig&, const std::string&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

#define RELAXOPT_DOUBLE_KEY(name)                                               \
  {                                                                             \
    #name, {                                                                    \
      [](RunConfig& c, const std::string& k, const std::string& v) {            \
        c.name = to_double(k, v);                                               \
      },                                                                        \
          [](const RunConfig& c) { return fmt(c.name); }                        \
    }                                                                           \
  }
#define RELAXOPT_SIZE_KEY(name)                                                 \
  {                                                                             \
    #name, {                                                                    \
      [](RunConfig& c, const std::string& k, const std::string& v) {            \
        c.name = static_cast<std::size_t>(to_uint(k, v));                       \
      },                                                                        \
          [](const RunConfig& c) { return std::to_string(c.name); }             \
    }                                                                           \
  }
#define RELAXOPT_STRING_KEY(name)                                               \
  {                                                                             \
    #name, {                                                                    \
      [](RunConfig& c, const std::string&, const std::string& v) { c.name = v; }, \
          [](const RunConfig& c) { return c.name; }                             \
    }                                                                           \
  }

const std::vector<std::pair<std::string, KeySpec>>& key_table() {
  static const std::vector<std::pair<std::string, KeySpec>> table = {
      RELAXOPT_DOUBLE_KEY(x_min),
      RELAXOPT_DOUBLE_KEY(x_max),
      RELAXOPT_SIZE_KEY(n_cells),
      RELAXOPT_DOUBLE_KEY(T),
      RELAXOPT_STRING_KEY(flux),
      RELAXOPT_DOUBLE_KEY(epsilon),
      RELAXOPT_DOUBLE_KEY(safety),
      RELAXOPT_DOUBLE_KEY(a_floor),
      RELAXOPT_STRING_KEY(speed),
      RELAXOPT_DOUBLE_KEY(c_cfl),
      RELAXOPT_STRING_KEY(tableau),
      RELAXOPT_STRING_KEY(scheme),
      RELAXOPT_STRING_KEY(limiter),
      RELAXOPT_STRING_KEY(adjoint_form),
      RELAXOPT_STRING_KEY(u0),
      RELAXOPT_DOUBLE_KEY(start),
      RELAXOPT_DOUBLE_KEY(alpha),
      RELAXOPT_DOUBLE_KEY(tol),
      RELAXOPT_SIZE_KEY(max_iter),
      RELAXOPT_STRING_KEY(metric),
      {"seed",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.seed = to_uint(k, v);
        },
        [](const RunConfig& c) { return std::to_string(c.seed); }}},
      RELAXOPT_STRING_KEY(output_dir),
      RELAXOPT_SIZE_KEY(frame_stride),
      RELAXOPT_DOUBLE_KEY(theta),
      {"grid_sizes",
       {[](RunConfig& c, const std::string& k, const std::string& v) {
          c.grid_sizes.clear();
          for (const auto& item : split_list(v)) {
            c.grid_sizes.push_back(static_cast<std::size_t>(to_uint(k, item)));
          }
        },
        [](const RunConfig& c) { return join(c.grid_sizes); }}},
      {"tableaus",
       {[](RunConfig& c, const std::string&, const std::string& v) {
          c.tableaus = split_list(v);
        },
        [](const RunConfig& c) { return join(c.tableaus); }}},
      RELAXOPT_SIZE_KEY(order_n_cells),
      RELAXOPT_DOUBLE_KEY(order_T),
      RELAXOPT_SIZE_KEY(levels),
      RELAXOPT_SIZE_KEY(ref_extra),
  };
  return table;
}

#undef RELAXOPT_DOUBLE_KEY
#undef RELAXOPT_SIZE_KEY
#undef RELAXOPT_STRING_KEY

std::string normalize_key(std::string key) {
  std::replace(key.begin(), key.end(), '-', '_');
  return key;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, spec] : key_table()) k.push_back(name);
    return k;
  }();
  return keys;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::istringstream is(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ParseError(lineno, "expected key = value");
    const std::string key = normalize_key(trim(t.substr(0, eq)));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ParseError(lineno, "empty key");
    const auto& keys = config_keys();
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      throw ParseError(lineno, "unknown key '" + key + "'");
    }
    kv.emplace_back(key, value);
  }
  return kv;
}

KeyValues load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

void apply_config(RunConfig& cfg, const KeyValues& kv) {
  const auto& table = key_table();
  for (const auto& [raw_key, value] : kv) {
    const std::string key = normalize_key(raw_key);
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const auto& e) { return e.first == key; });
    if (it == table.end()) throw ConfigError(key, "unknown key");
    it->second.set(cfg, key, value);
  }
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* key, const std::string& what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(c.x_max > c.x_min, "x_max", "must exceed x_min");
  require(c.n_cells >= 2, "n_cells", "must be at least 2");
  require(c.T > 0.0, "T", "must be positive");
  require(c.flux == "burgers" || c.flux == "linear", "flux",
          "unknown flux '" + c.flux + "' (known: burgers, linear)");
  require(c.epsilon > 0.0, "epsilon", "must be positive");
  require(c.safety >= 1.0, "safety", "must be >= 1");
  require(c.a_floor > 0.0, "a_floor", "must be positive");
  if (c.speed != "auto" && c.speed != "data") {
    double v = 0.0;
    const auto r = std::from_chars(c.speed.data(), c.speed.data() + c.speed.size(), v);
    require(r.ec == std::errc{} && r.ptr == c.speed.data() + c.speed.size() && v > 0.0 &&
                std::isfinite(v),
            "speed", "expected auto, data, or a positive number");
  }
  require(c.c_cfl > 0.0, "c_cfl", "must be positive");
  try {
    parse_scheme(c.scheme);
  } catch (const InputError& e) {
    throw ConfigError("scheme", e.what());
  }
  require(c.limiter == "minmod", "limiter", "unknown limiter (known: minmod)");
  try {
    parse_adjoint_form(c.adjoint_form);
  } catch (const InputError& e) {
    throw ConfigError("adjoint_form", e.what());
  }
  if (c.u0 != "sine") {
    double v = 0.0;
    const auto r = std::from_chars(c.u0.data(), c.u0.data() + c.u0.size(), v);
    require(r.ec == std::errc{} && r.ptr == c.u0.data() + c.u0.size() && std::isfinite(v),
            "u0", "expected sine or a number");
  }
  require(c.alpha > 0.0 && c.alpha < 1.0, "alpha", "must lie in (0, 1)");
  require(c.tol > 0.0, "tol", "must be positive");
  try {
    parse_metric(c.metric);
  } catch (const InputError& e) {
    throw ConfigError("metric", e.what());
  }
  require(c.frame_stride > 0, "frame_stride", "must be positive");
  require(c.theta > 0.0, "theta", "must be positive");
  require(!c.grid_sizes.empty(), "grid_sizes", "must not be empty");
  for (auto n : c.grid_sizes) require(n >= 2, "grid_sizes", "entries must be >= 2");
  require(!c.tableaus.empty(), "tableaus", "must not be empty");
  require(c.order_n_cells >= 2, "order_n_cells", "must be at least 2");
  require(c.order_T > 0.0, "order_T", "must be positive");
  require(c.levels >= 3, "levels", "must be at least 3");
  auto require_tableau = [](const std::string& name, const char* key) {
    try {
      (void)resolve_tableau(name);
    } catch (const Error& e) {
      throw ConfigError(key, e.what());
    }
  };
  require_tableau(c.tableau, "tableau");
  for (const auto& t : c.tableaus) require_tableau(t, "tableaus");
  require(c.levels + c.ref_extra < 20, "ref_extra", "too many refinements");
}

RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const KeyValues& flags, const char* env_output_dir) {
  RunConfig cfg;
  if (file) apply_config(cfg, load_config_file(*file));
  apply_config(cfg, flags);
  if (cfg.output_dir.empty() && env_output_dir && *env_output_dir) {
    cfg.output_dir = env_output_dir;
  }
  validate(cfg);
  return cfg;
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream os;
  bool first = true;
  for (const auto& [name, spec] : key_table()) {
    os << (first ? "" : " ") << name << '=' << spec.get(cfg);
    first = false;
  }
  return os.str();
}

std::filesystem::path output_dir(const RunConfig& cfg) {
  return cfg.output_dir.empty() ? std::filesystem::path(".")
                                : std::filesystem::path(cfg.output_dir);
}

const std::vector<std::string>& subcommands() {
  static const std::vector<std::string> names = {"solve", "optimize", "check",
                                                  "order-study", "tracking-table"};
  return names;
}

namespace {

class CheckFailed : public Error {
 public:
  using Error::Error;
};

RelaxConfig relax_of(const RunConfig& c) {
  RelaxConfig r;
  r.epsilon = c.epsilon;
  r.safety = c.safety;
  r.a_floor = c.a_floor;
  return r;
}

ControlProblem problem_of(const RunConfig& c) {
  ControlProblem prob;
  prob.grid = make_grid(c.x_min, c.x_max, c.n_cells);
  prob.model = flux_model_by_name(c.flux);
  prob.relax = relax_of(c);
  prob.T = c.T;
  prob.tableau = resolve_tableau(c.tableau);
  prob.c_cfl = c.c_cfl;
  prob.scheme = parse_scheme(c.scheme);
  if (c.speed == "data") {
    prob.relax.speed = subchar_speed(prob.model, sine_profile(prob.grid), prob.relax);
  } else if (c.speed != "auto") {
    prob.relax.speed = std::stod(c.speed);
  }
  prob.u_d.assign(c.n_cells, 0.0);
  return prob;
}

/// Desired state: forward solve from 1/2 + sin(x) on the same setup.
ControlProblem tracking_problem_of(const RunConfig& c) {
  ControlProblem prob = problem_of(c);
  prob.u_d = integrate(prob, sine_profile(prob.grid)).u;
  return prob;
}

std::ofstream open_output(const RunConfig& cfg, const std::string& name,
                          std::filesystem::path& path) {
  const auto dir = output_dir(cfg);
  std::filesystem::create_directories(dir);
  path = dir / name;
  std::ofstream os(path);
  if (!os) throw InputError("cannot write " + path.string());
  return os;
}

std::string header(const RunConfig& cfg, const std::string& command) {
  return "relaxopt " + command + " " + describe(cfg);
}

int cmd_solve(const RunConfig& cfg, std::ostream& out) {
  ControlProblem prob = problem_of(cfg);
  Field u0 = cfg.u0 == "sine" ? sine_profile(prob.grid)
                              : Field(cfg.n_cells, std::stod(cfg.u0));
  const Trajectory traj = solve_forward(prob, u0, false);
  std::filesystem::path path;
  auto os = open_output(cfg, "trajectory.csv", path);
  write_trajectory_csv(os, traj, prob.grid, cfg.frame_stride, header(cfg, "solve"));
  out << "solve: " << traj.n_steps() << " steps, a=" << traj.a << ", h=" << traj.h
      << "; wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_optimize(const RunConfig& cfg, std::ostream& out) {
  const ControlProblem prob = tracking_problem_of(cfg);
  DescentOptions opts;
  opts.alpha = cfg.alpha;
  opts.tol = cfg.tol;
  opts.max_iter = cfg.max_iter;
  opts.metric = parse_metric(cfg.metric);
  opts.form = parse_adjoint_form(cfg.adjoint_form);
  const Field start(cfg.n_cells, cfg.start);
  const DescentResult res = steepest_descent(prob, start, opts);
  const std::string h = header(cfg, "optimize");

  std::filesystem::path trace_path, control_path, summary_path;
  {
    auto os = open_output(cfg, "trace.csv", trace_path);
    write_trace_csv(os, res.report, h);
  }
  {
    auto os = open_output(cfg, "control.csv", control_path);
    write_gradient_csv(os, prob.grid, res.u0, adjoint_gradient(prob, res.u0, opts.form), h);
  }
  const auto& r = res.report;
  {
    auto os = open_output(cfg, "summary.csv", summary_path);
    os << "# " << h << '\n'
       << "converged,iterations,final_cost,alpha,wall_time_s\n"
       << (r.converged ? "true" : "false") << ',' << r.iterations << ','
       << fmt(r.final_cost) << ',' << fmt(r.step_size) << ',' << fmt(r.wall_time) << '\n';
  }
  out << "optimize: converged=" << (r.converged ? "true" : "false")
      << " iterations=" << r.iterations << " final_cost=" << r.final_cost
      << "; wrote " << trace_path.string() << ", " << control_path.string() << ", "
      << summary_path.string() << '\n';
  return kExitOk;
}

int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const ImexTableau tab = resolve_tableau(cfg.tableau);
  const std::string h = header(cfg, "check");
  bool all_ok = true;
  auto verdict = [&](bool ok, const std::string& label, const std::string& detail) {
    out << (ok ? "PASS " : "FAIL ") << label << ": " << detail << '\n';
    all_ok = all_ok && ok;
  };

  const OrderReport rep = check_order(tab);
  std::filesystem::path order_path, tab_path, grad_path;
  {
    auto os = open_output(cfg, "order_report.csv", order_path);
    os << "# " << h << '\n';
    os << "# forward_order=" << rep.forward_order
       << " adjoint_system_order=" << rep.adjoint_system_order << " branch="
       << rep.branch_used << '\n';
    os << "label,order,residual\n";
    os.precision(17);
    for (const auto& c : rep.condition_residuals) {
      os << c.label << ',' << c.order << ',' << c.residual << '\n';
    }
    for (const auto& c : rep.informational) {
      os << "info:" << c.label << ',' << c.order << ',' << c.residual << '\n';
    }
  }
  {
    auto os = open_output(cfg, "tableau.txt", tab_path);
    os << "# " << h << '\n' << format_tableau(tab);
  }
  out << "tableau " << tab.name << " (s=" << tab.s << "): forward order "
      << rep.forward_order << ", adjoint-system order " << rep.adjoint_system_order
      << ", branch: " << rep.branch_used << '\n';
  const auto names = builtin_tableau_names();
  if (std::find(names.begin(), names.end(), cfg.tableau) != names.end()) {
    const int claimed = builtin_claimed_order(cfg.tableau);
    verdict(rep.forward_order == claimed, "order",
            "registered " + std::to_string(claimed) + ", measured " +
                std::to_string(rep.forward_order));
  }

  ControlProblem prob = tracking_problem_of(cfg);
  prob.tableau = tab;
  const Field u0(cfg.n_cells, cfg.start);
  const GradientReport gr = gradient_report(prob, u0, cfg.theta, true);
  {
    auto os = open_output(cfg, "gradient_report.csv", grad_path);
    write_gradient_report_csv(os, gr, h);
  }
  verdict(gr.max_rel_err <= 1e-4, "gradient-vs-fd",
          "max relative deviation " + fmt(gr.max_rel_err) + " (limit 1e-4)");

  const Field g_ark = adjoint_gradient(prob, u0, AdjointForm::ark);
  const Field g_xi = adjoint_gradient(prob, u0, AdjointForm::xi);
  const Field g_zeta = adjoint_gradient(prob, u0, AdjointForm::zeta);
  const double form_dev =
      std::max(max_rel_deviation(g_xi, g_ark), max_rel_deviation(g_zeta, g_ark));
  verdict(form_dev <= 1e-11, "adjoint-forms",
          "ark/xi/zeta deviation " + fmt(form_dev) + " (limit 1e-11)");

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal;
  double worst = 0.0;
  bool dir_ok = true;
  for (int k = 0; k < 10; ++k) {
    Field d(cfg.n_cells);
    for (auto& e : d) e = normal(rng);
    double ad = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) ad += g_ark[i] * d[i];
    const double fd = fd_directional(prob, u0, d, 1e-5);
    const double limit = std::max(1e-5 * std::abs(ad), 1e-9);
    worst = std::max(worst, std::abs(ad - fd) / std::max(std::abs(ad), 1e-300));
    dir_ok = dir_ok && std::abs(ad - fd) <= limit;
  }
  verdict(dir_ok, "directional-derivatives",
          "10 random directions, worst relative deviation " + fmt(worst));
  out << "wrote " << order_path.string() << ", " << tab_path.string() << ", "
      << grad_path.string() << '\n';
  if (!all_ok) throw CheckFailed("one or more checks failed");
  return kExitOk;
}

int cmd_order_study(const RunConfig& cfg, std::ostream& out) {
  OrderStudyConfig sc;
  sc.n_cells = cfg.order_n_cells;
  sc.T = cfg.order_T;
  sc.levels = cfg.levels;
  sc.ref_extra = cfg.ref_extra;
  sc.c_cfl = cfg.c_cfl;
  sc.relax = relax_of(cfg);
  if (cfg.speed != "auto" && cfg.speed != "data") sc.relax.speed = std::stod(cfg.speed);
  sc.scheme = parse_scheme(cfg.scheme);
  sc.form = parse_adjoint_form(cfg.adjoint_form);
  std::vector<OrderStudyResult> results;
  for (const auto& name : cfg.tableaus) {
    const ImexTableau tab = resolve_tableau(name);
    results.push_back(temporal_order_study(tab, sc));
    const auto& r = results.back();
    out << r.tableau << ": forward slope " << fmt(r.forward_order) << ", gradient slope "
        << fmt(r.gradient_order) << " (checker: forward " << r.target_order
        << ", adjoint system " << r.adjoint_target_order << ")"
        << (r.inconclusive ? " [inconclusive: non-monotone errors]" : "") << '\n';
  }
  std::filesystem::path path;
  auto os = open_output(cfg, "order_study.csv", path);
  write_order_csv(os, results, header(cfg, "order-study"));
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

int cmd_tracking_table(const RunConfig& cfg, std::ostream& out) {
  TrackingConfig tc;
  tc.grid_sizes = cfg.grid_sizes;
  tc.T = cfg.T;
  tc.c_cfl = cfg.c_cfl;
  tc.tableau = cfg.tableau;
  tc.scheme = parse_scheme(cfg.scheme);
  tc.relax = relax_of(cfg);
  tc.fixed_speed = cfg.speed == "data";
  if (cfg.speed != "auto" && cfg.speed != "data") tc.relax.speed = std::stod(cfg.speed);
  tc.start_value = cfg.start;
  tc.descent.alpha = cfg.alpha;
  tc.descent.tol = cfg.tol;
  tc.descent.max_iter = cfg.max_iter;
  tc.descent.metric = parse_metric(cfg.metric);
  tc.descent.form = parse_adjoint_form(cfg.adjoint_form);
  const auto rows = tracking_table(tc);
  for (const auto& r : rows) {
    out << "N=" << r.n_cells << " iterations=" << r.iterations
        << " final_cost=" << r.final_cost << " converged=" << (r.converged ? "true" : "false")
        << (r.diverged ? " diverged" : "") << '\n';
  }
  std::filesystem::path path;
  auto os = open_output(cfg, "tracking_table.csv", path);
  write_tracking_csv(os, rows, header(cfg, "tracking-table"));
  out << "wrote " << path.string() << '\n';
  return kExitOk;
}

}  // namespace

int run_command(const std::string& command, const RunConfig& cfg, std::ostream& out,
                std::ostream& err) {
  try {
    validate(cfg);
    if (command == "solve") return cmd_solve(cfg, out);
    if (command == "optimize") return cmd_optimize(cfg, out);
    if (command == "check") return cmd_check(cfg, out);
    if (command == "order-study") return cmd_order_study(cfg, out);
    if (command == "tracking-table") return cmd_tracking_table(cfg, out);
    err << "error: unknown command '" << command << "'\n";
    return kExitValidation;
  } catch (const DivergenceError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const CheckFailed& e) {
    err << "error: " << e.what() << '\n';
    return kExitCheckFailed;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
}

int run_command(const std::string& command,
                const std::optional<std::filesystem::path>& config_file,
                const KeyValues& flags, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = resolve_config(config_file, flags, std::getenv("RELAXOPT_OUTPUT_DIR"));
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return run_command(command, cfg, out, err);
}

}  // namespace relaxopt

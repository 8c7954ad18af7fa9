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

// Run configuration and subcommand dispatch behind the relaxopt tool.
// Precedence: built-in defaults < config file < command-line flags. The
// output directory falls back to $RELAXOPT_OUTPUT_DIR, then ".".

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "relaxopt/error.hpp"

namespace relaxopt {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidation = 1,
  kExitDivergence = 2,
  kExitCheckFailed = 3,
};

/// A config value that does not parse or violates a precondition.
class ConfigError : public InputError {
 public:
  ConfigError(const std::string& key, const std::string& what)
      : InputError("config key '" + key + "': " + what), key_(key) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  double x_min = 0.0;
  double x_max = 6.283185307179586;
  std::size_t n_cells = 100;
  double T = 2.0;
  std::string flux = "burgers";
  double epsilon = 1e-6;
  double safety = 1.2;
  double a_floor = 0.1;
  /// "auto" (from each solve's u0), "data" (from 1/2 + sin(x)), or a number.
  std::string speed = "data";
  double c_cfl = 0.5;
  std::string tableau = "imex-euler";
  std::string scheme = "upwind1";
  std::string limiter = "minmod";
  std::string adjoint_form = "ark";
  /// Initial data for solve: "sine" or a constant.
  std::string u0 = "sine";
  /// Constant starting control for optimize.
  double start = 0.5;
  double alpha = 0.1;
  double tol = 1e-2;
  std::size_t max_iter = 500;
  std::string metric = "l2";
  std::uint64_t seed = 1;
  std::string output_dir;
  std::size_t frame_stride = 10;
  double theta = 1e-6;
  std::vector<std::size_t> grid_sizes{100, 150, 200, 300};
  std::vector<std::string> tableaus{"imex-euler", "ars-222"};
  std::size_t order_n_cells = 2048;
  double order_T = 0.5;
  std::size_t levels = 4;
  std::size_t ref_extra = 3;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Every accepted key, in the order describe() prints them.
const std::vector<std::string>& config_keys();

/// `key = value` lines; '#' starts a comment. Throws ParseError.
KeyValues parse_config_text(const std::string& text);
KeyValues load_config_file(const std::filesystem::path& path);

/// Applies values in order; throws ConfigError naming the key.
void apply_config(RunConfig& cfg, const KeyValues& kv);

/// Cross-key checks and module preconditions; throws ConfigError.
void validate(const RunConfig& cfg);

/// Defaults, then the file (if any), then flags, then the env fallback for
/// output_dir; validated.
RunConfig resolve_config(const std::optional<std::filesystem::path>& file,
                         const KeyValues& flags,
                         const char* env_output_dir = nullptr);

/// Single line "key=value key=value ..." used as provenance header.
std::string describe(const RunConfig& cfg);

std::filesystem::path output_dir(const RunConfig& cfg);

const std::vector<std::string>& subcommands();

/// Runs one subcommand and maps errors to exit codes. Human-readable
/// progress goes to `out`, error messages to `err`.
int run_command(const std::string& command, const RunConfig& cfg,
                std::ostream& out, std::ostream& err);

/// Resolves the config and runs; config errors map to kExitValidation.
int run_command(const std::string& command,
                const std::optional<std::filesystem::path>& config_file,
                const KeyValues& flags, std::ostream& out, std::ostream& err);

}  // namespace relaxopt

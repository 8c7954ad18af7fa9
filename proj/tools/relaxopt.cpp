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

// relaxopt: forward solves, initial-control optimisation and studies for
// relaxation approximations of scalar conservation laws.

#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "relaxopt/cli.hpp"

int main(int argc, char** argv) {
  using namespace relaxopt;
  CLI::App app{"Optimal control of relaxation systems with IMEX Runge-Kutta schemes"};
  app.require_subcommand(1, 1);
  app.fallthrough();

  std::string config_file;
  app.add_option("-c,--config", config_file, "key = value config file");

  std::map<std::string, std::string> values;
  std::map<std::string, CLI::Option*> options;
  for (const auto& key : config_keys()) {
    std::string flag = key;
    for (auto& ch : flag) {
      if (ch == '_') ch = '-';
    }
    options[key] = app.add_option("--" + flag, values[key], "overrides config key " + key);
  }

  for (const auto& name : subcommands()) app.add_subcommand(name);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  KeyValues flags;
  for (const auto& key : config_keys()) {
    if (options[key]->count() > 0) flags.emplace_back(key, values[key]);
  }
  std::optional<std::filesystem::path> file;
  if (!config_file.empty()) file = config_file;
  const std::string command = app.get_subcommands().front()->get_name();
  return run_command(command, file, flags, std::cout, std::cerr);
}

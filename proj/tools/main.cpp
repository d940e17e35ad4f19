// Copyright 2026 The perchsim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// perchsim: headless mission runs, teleop bridge and experiment reproduction.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "service.hpp"

using namespace perch;
using namespace perch::service;

int main(int argc, char** argv) {
  CLI::App app{"perchsim - perching aerial manipulator simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string params_file;
  std::uint64_t seed = 1;
  std::string out = "out";
  app.add_option("--params", params_file, "parameter file (defaults when omitted)");
  app.add_option("--seed", seed, "random seed");
  app.add_option("--out", out, "output directory");

  auto* run = app.add_subcommand("run", "play a mission script as fast as possible");
  std::string script;
  double max_time = 600.0;
  run->add_option("script", script, "mission script")->required();
  run->add_option("--max-time", max_time, "simulated seconds before giving up");

  auto* serve = app.add_subcommand("serve", "stream telemetry and accept commands over websocket");
  int port = default_port();
  double rate = 1.0;
  serve->add_option("--port", port, std::string("listen port (env ") + kPortEnv + ")")
      ->capture_default_str();
  serve->add_option("--rate", rate, "real-time factor")->capture_default_str()->check(
      CLI::PositiveNumber);

  auto* experiment = app.add_subcommand("experiment", "run a seeded experiment and write its report");
  std::string name;
  bool serial = false;
  long long fuzz_commands = 1'000'000;
  experiment->add_option("name", name, "force_power|endurance|perching|drilling|detachment|fuzz|all")
      ->required();
  experiment->add_flag("--serial", serial, "use the serial kernels");
  experiment->add_option("--fuzz-commands", fuzz_commands, "commands for the fuzz experiment");

  auto* dump = app.add_subcommand("params", "print the default parameter file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitParseError;
  }

  std::optional<std::filesystem::path> params;
  if (!params_file.empty()) params = params_file;

  if (*run) {
    RunOptions o;
    o.script = script;
    o.params = params;
    o.seed = seed;
    o.out = out;
    o.max_time = max_time;
    return cli_run(o, std::cerr).exit_code;
  }
  if (*serve) {
    ServeOptions o;
    o.port = port;
    o.params = params;
    o.seed = seed;
    o.rate = rate;
    return serve_teleop(o, std::cerr);
  }
  if (*experiment) {
    ExperimentOptions o;
    o.name = name;
    o.params = params;
    o.seed = seed;
    o.out = out;
    o.serial = serial;
    o.fuzz_commands = fuzz_commands;
    return run_experiment(o, std::cerr);
  }
  if (*dump) {
    try {
      std::cout << format_params(load_params_or_defaults(params));
    } catch (const ParseError& e) {
      std::cerr << "error: " << e.what() << "\n";
      return kExitParseError;
    }
  }
  return kExitOk;
}

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

#pragma once

#include <atomic>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "perchsim/experiments.hpp"
#include "perchsim/script.hpp"

namespace perch::service {

enum ExitCode : int {
  kExitOk = 0,
  kExitFailure = 1,     // mission failed, timed out or an experiment missed its band
  kExitParseError = 2,  // unreadable or malformed input
  kExitRejected = 3,    // a guard refused a scripted command
};

inline constexpr int kDefaultPort = 8765;
inline constexpr const char* kPortEnv = "PERCHSIM_PORT";

/// Port from PERCHSIM_PORT, or kDefaultPort when unset or malformed.
int default_port();

struct RunOptions {
  std::filesystem::path script;
  std::optional<std::filesystem::path> params;  // defaults when empty
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  double max_time = 600.0;  // s of simulated time
  double tail = 2.0;        // s simulated after the last entry fires
};

struct RunResult {
  int exit_code = kExitOk;
  std::string message;
  std::vector<Mode> mode_trace;
  double final_time = 0.0;
  long long telemetry_rows = 0;
};

/// Plays a mission script as fast as possible. Writes telemetry.csv,
/// events.log and summary.json into options.out.
RunResult cli_run(const RunOptions& options, std::ostream& log);

struct ExperimentOptions {
  std::string name;  // force_power | endurance | perching | drilling | detachment | fuzz | all
  std::optional<std::filesystem::path> params;
  std::uint64_t seed = 1;
  std::filesystem::path out = "out";
  bool serial = false;
  long long fuzz_commands = 1'000'000;
};

const std::vector<std::string>& experiment_names();
int run_experiment(const ExperimentOptions& options, std::ostream& log);

/// Loads `path`, or returns defaults when it is empty. Throws ParseError.
ParameterSet load_params_or_defaults(const std::optional<std::filesystem::path>& path);

// --- teleop ---------------------------------------------------------------

/// Owns one simulation. Inbound text is validated immediately and queued;
/// queued commands are applied between ticks by whoever calls advance().
class TeleopHub {
 public:
  using Sink = std::function<void(const std::string&)>;

  TeleopHub(ParameterSet params, std::uint64_t seed, SimConfig config = {});

  /// Accepts a JSON object {"type":"command","command":"<script command>","id":...}.
  /// Malformed input is answered at once with an error frame and never
  /// reaches the simulation. Valid commands are answered with an ack or a
  /// rejection once applied.
  void receive(const std::string& message, Sink reply);

  /// Applies queued commands, then runs `ticks` steps. Telemetry lines are
  /// handed to the broadcast sink.
  void advance(long long ticks);
  void set_broadcast(Sink sink);

  const Simulation& sim() const { return sim_; }
  std::size_t pending() const;

 private:
  struct Pending {
    OperatorCommand command;
    nlohmann::json id;
    Sink reply;
  };
  void drain();

  Simulation sim_;
  mutable std::mutex mutex_;
  std::deque<Pending> queue_;
  Sink broadcast_;
};

nlohmann::json error_frame(const std::string& error, const nlohmann::json& id = nullptr);

struct ServeOptions {
  int port = kDefaultPort;  // 0 picks a free port
  std::optional<std::filesystem::path> params;
  std::uint64_t seed = 1;
  double rate = 1.0;  // real-time factor
};

/// Websocket bridge. Every client receives every telemetry line; commands
/// from any client go to the one simulation (last writer wins).
class TeleopServer {
 public:
  explicit TeleopServer(const ServeOptions& options);
  ~TeleopServer();
  TeleopServer(const TeleopServer&) = delete;
  TeleopServer& operator=(const TeleopServer&) = delete;

  /// Binds and starts the network and simulation threads.
  void start();
  void stop();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Runs a server until SIGINT or SIGTERM.
int serve_teleop(const ServeOptions& options, std::ostream& log);

}  // namespace perch::service

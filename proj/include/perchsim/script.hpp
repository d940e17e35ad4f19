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

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "perchsim/simulation.hpp"

namespace perch {

/// Observable predicates a script can wait for.
enum class Condition {
  Contact,         // both cups touching
  Attached,        // both cups holding
  RampedDown,
  GantryArrived,
  ThetaUp,         // table at the 90 deg stop
  AtWall,          // tool pressing on the wall
  DepthGoal,
  Retracted,       // slide home
  DetachComplete,
  Separated,       // no cup holding
  ModeIs,
};

struct Trigger {
  enum class Kind { At, After, When } kind = Kind::At;
  double seconds = 0.0;
  Condition condition = Condition::Contact;
  Mode mode = Mode::Flight;  // for ModeIs
};

struct ScriptEntry {
  Trigger trigger;
  OperatorCommand command;
  int line = 0;
};

/// Text format, one entry per line, `#` starts a comment:
///   at <t> <command>          absolute sim time
///   after <dt> <command>      relative to the previous entry firing
///   when <cond> <command>     as soon as the condition holds
/// Conditions: contact attached ramped_down gantry_arrived theta_up at_wall
///             depth_goal retracted detach_complete separated mode=<mode>
struct MissionScript {
  std::vector<ScriptEntry> entries;
};

MissionScript parse_script(std::string_view text);
MissionScript load_script(const std::filesystem::path& path);
std::string format_script(const MissionScript& script);
std::string format_trigger(const Trigger& trigger);

bool condition_holds(Condition condition, Mode mode, const Simulation& sim);

/// Feeds script entries to a simulation in order.
class ScriptPlayer {
 public:
  explicit ScriptPlayer(MissionScript script) : script_(std::move(script)) {}

  struct Rejection {
    int line = 0;
    std::string command;
    std::string reason;
  };

  /// Submits every entry that is due; stops at the first rejection.
  std::optional<Rejection> poll(Simulation& sim);
  bool finished() const { return next_ == script_.entries.size(); }
  std::size_t next_index() const { return next_; }

 private:
  MissionScript script_;
  std::size_t next_ = 0;
  double last_fire_ = 0.0;
};

}  // namespace perch

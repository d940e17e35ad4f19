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

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "perchsim/commands.hpp"

namespace perch {

/// Which degrees of freedom a mode holds fixed.
struct LockSet {
  bool theta_locked = true;
  bool slide_locked = true;
  bool gantry_locked = true;
  bool operator==(const LockSet&) const = default;
};

/// Per-mode lock rows. Detachment has no row of its own; the sequencer owns every
/// freedom there, so nothing is held by the mode.
LockSet enforce_locks(Mode mode);

/// Whether the physical hinge state keeps every freedom the mode locks.
bool hinge_respects(const LockSet& locks, HingeLockState hinge);

/// Snapshot of the quantities the guards read.
struct MissionView {
  double time = 0.0;
  bool pumps_on = false;
  bool valves_open = false;
  bool contact = false;   // both cups
  bool attached = false;  // both cups
  bool any_attached = false;
  bool ramp_down_started = false;
  bool ramped_down = false;
  bool gantry_centered = false;
  HingeLockState hinge = HingeLockState::Locked;
  double theta = 0.0;
  double slide = 0.0;
  bool tool_on = false;
  bool depth_goal_reached = false;
  bool detach_hover_reached = false;
  bool detach_complete = false;
};

namespace act {
struct Lock { HingeLockState state; };
struct Gantry { Vec2 xy; };
struct PumpsOn { bool on; };
struct ValvesOpen { bool open; };
struct Tool { bool on; };
struct Rotation { double throttle; };
struct Feed { double throttle; FeedDirection direction; };
struct FlightRef { FlightReference ref; };
struct RampDown {};
struct StartDetachment { bool aborted; };
struct DetachPumpsOff {};
struct DetachValvesOpen {};
}  // namespace act

using Action = std::variant<act::Lock, act::Gantry, act::PumpsOn, act::ValvesOpen, act::Tool,
                            act::Rotation, act::Feed, act::FlightRef, act::RampDown,
                            act::StartDetachment, act::DetachPumpsOff, act::DetachValvesOpen>;

struct HandleResult {
  Mode mode = Mode::Flight;
  std::vector<Action> actions;
  std::optional<std::string> rejection;

  bool accepted() const { return !rejection.has_value(); }
};

/// Guarded mode machine. Rejected commands leave the mode unchanged and
/// produce no actions.
HandleResult handle(Mode mode, const OperatorCommand& command, const MissionView& view,
                    const ParameterSet& params);

/// True for every word of Flight (Perching Rotation Manipulation Detachment Flight)*.
bool is_valid_mode_trace(const std::vector<Mode>& trace);
/// True when `trace` can still be extended to a valid word.
bool is_mode_trace_prefix(const std::vector<Mode>& trace);

}  // namespace perch

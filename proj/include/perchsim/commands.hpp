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
#include <string_view>
#include <variant>

#include "perchsim/control.hpp"

namespace perch {

enum class Mode { Flight, Perching, Rotation, Manipulation, Detachment };

const char* to_string(Mode mode);
std::optional<Mode> mode_from_string(std::string_view text);

struct SetFlightRef {
  Vec3 velocity = Vec3::Zero();  // heading frame, m/s
  double heading = 0.0;          // rad
};
struct SetMode {
  Mode mode = Mode::Flight;
};
struct Pumps {
  bool on = false;
};
struct Valves {
  bool open = false;
};
struct RotationThrottle {
  double value = 0.0;
};
struct FeedThrottle {
  double value = 0.0;
  FeedDirection direction = FeedDirection::Advance;
};
struct GantryTarget {
  Vec2 xy = Vec2::Zero();  // m, body frame
};
struct ToolPower {
  bool on = false;
};
struct RampDownRotors {};

using OperatorCommand = std::variant<SetFlightRef, SetMode, Pumps, Valves, RotationThrottle,
                                     FeedThrottle, GantryTarget, ToolPower, RampDownRotors>;

/// One-line text form shared by mission scripts and the teleop socket:
///   flight_ref <vx> <vy> <vz> <heading_deg>
///   mode <flight|perching|rotation|manipulation|detachment>
///   pumps <on|off>           valves <open|close>
///   rotation_throttle <0..1> feed_throttle <0..1> <advance|retract>
///   gantry <x> <y>           tool <on|off>
///   ramp_down
/// Throws ParseError.
OperatorCommand parse_command(std::string_view text);
std::string format_command(const OperatorCommand& command);

}  // namespace perch

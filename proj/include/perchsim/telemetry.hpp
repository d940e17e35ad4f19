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

#include <array>
#include <ostream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "perchsim/commands.hpp"

namespace perch {

inline constexpr int kTelemetrySchemaVersion = 1;

struct TelemetryRecord {
  double time = 0.0;
  Mode mode = Mode::Flight;
  HingeLockState hinge = HingeLockState::Locked;
  double theta_deg = 0.0;
  double slide_mm = 0.0;
  Vec3 position = Vec3::Zero();
  Vec4 orientation_wxyz = Vec4(1.0, 0.0, 0.0, 0.0);
  Vec4 rotor_rpm = Vec4::Zero();
  std::array<double, kCupCount> cup_pressure_kpa{};
  std::array<bool, kCupCount> attached{};
  bool pumps_on = false;
  bool valves_open = false;
  double feed_force = 0.0;
  double power = 0.0;
  Vec2 gantry_mm = Vec2::Zero();
  double drill_depth_mm = 0.0;
  bool tool_on = false;
  Vec2 laser_pixel = Vec2::Zero();
  bool laser_visible = false;
  double wall_distance = 0.0;
  std::string detach_phase;
  std::string last_rejection;
};

/// Frozen column order; append only.
std::string_view telemetry_csv_header();
void write_csv_row(std::ostream& os, const TelemetryRecord& r);

nlohmann::json to_json(const TelemetryRecord& r);
/// Throws ParseError on a malformed or wrong-version record.
TelemetryRecord telemetry_from_json(const nlohmann::json& j);

}  // namespace perch

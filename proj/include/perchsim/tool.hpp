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
#include <random>
#include <string>

#include "perchsim/params.hpp"

namespace perch {

/// XY positioning table. The carriage (tool) lags the motor by at most half
/// the backlash on each axis.
struct GantryState {
  Vec2 motor = Vec2::Zero();
  Vec2 tool = Vec2::Zero();
  Vec2 target = Vec2::Zero();

  bool arrived() const { return motor == target; }
};

/// Starts at rest with the backlash taken up in the positive direction.
GantryState make_gantry(const Vec2& tool_pos, const RobotParams& params);

bool in_workspace(const Vec2& p, const RobotParams& params, double tol = 1e-12);

/// Returns a rejection reason when the target lies outside the workspace.
std::optional<std::string> set_gantry_target(GantryState& gantry, const Vec2& target,
                                             const RobotParams& params);

GantryState gantry_step(const GantryState& gantry, double dt, const RobotParams& params);

/// Wall-plane coordinates: u to the operator's right, v up, both in metres.
struct WallFrame {
  Vec3 origin = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitY();
  Vec3 v_axis = Vec3::UnitZ();

  static WallFrame from(const Environment& env);
  Vec2 project(const Vec3& world) const;
  Vec3 lift(const Vec2& uv) const;
};

struct PixelObservation {
  Vec2 pixel = Vec2::Zero();  // from the image centre, +u right, +v up
  bool visible = false;
};

/// Image of the laser cross for a tooltip at `tool_uv` relative to the view
/// centre. Noise is drawn from `rng` only when pointing noise is enabled.
PixelObservation observe_laser_cross(const Vec2& tool_uv, const SensingModel& model,
                                     std::mt19937_64* rng = nullptr);

/// Tooltip offset from the view centre implied by a pixel observation.
Vec2 tool_from_pixel(const Vec2& pixel, const SensingModel& model);

/// Feed-force threshold actually in effect for a tool in a material.
double effective_min_feed(const ToolSpec& tool, const Material& material);

/// Advances drill depth; no progress at or below the threshold feed force.
double drill_step(double feed_force, const ToolSpec& tool, const Material& material, double depth,
                  double dt);

/// Components of a drilled hole's position, wall coordinates.
struct HoleErrorBreakdown {
  Vec2 target = Vec2::Zero();
  Vec2 alignment = Vec2::Zero();  // residual after visual alignment
  Vec2 backlash = Vec2::Zero();
  Vec2 slip = Vec2::Zero();
  Vec2 drift = Vec2::Zero();      // thrust-imbalance lateral drift
  Vec2 jitter = Vec2::Zero();     // slide play
};

Vec2 hole_position(const HoleErrorBreakdown& hole);

/// Lateral tip drift from per-rotor thrust gain errors at a feed speed.
Vec2 imbalance_drift(const Vec4& thrust_gains, double feed_thrust_per_rotor,
                     const RobotParams& params, const HoleNoise& noise);

}  // namespace perch

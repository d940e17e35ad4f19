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

#include <vector>

#include "perchsim/simulation.hpp"

namespace perch {

/// Scripted stand-in for the human operator: flies in, perches, tilts, lines
/// the laser cross up with the target on the camera image, drills, detaches.
struct AgentConfig {
  double approach_speed = 0.4;
  double rotation_throttle = 0.8;
  double feed_throttle = 0.95;
  int max_align_moves = 6;
  double settle_time = 0.2;
  double phase_timeout = 60.0;
  bool detach = true;
};

enum class AgentOutcome { Drilled, Unreachable, Failed, Timeout, Rejected };

const char* to_string(AgentOutcome outcome);

struct HoleRun {
  AgentOutcome outcome = AgentOutcome::Failed;
  Vec2 target = Vec2::Zero();
  Vec2 perch_uv = Vec2::Zero();      // attachment origin after perching
  Vec2 motor_uv = Vec2::Zero();      // where the tool would sit without backlash
  Vec2 aligned_uv = Vec2::Zero();    // tooltip when the drill starts
  Vec2 final_uv = Vec2::Zero();      // tooltip at depth goal
  double slip = 0.0;                 // m
  int align_moves = 0;
  double finish_time = 0.0;
  std::string detail;
};

/// Flies a full mission against `target` (wall uv) with the simulation's
/// camera centred on it.
HoleRun run_hole_mission(Simulation& sim, const AgentConfig& config);

/// Tooltip wall position the gantry motor alone would give.
Vec2 motor_tool_uv(const Simulation& sim);

}  // namespace perch

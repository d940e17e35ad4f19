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

#include "perchsim/frames.hpp"
#include "perchsim/rotor.hpp"

namespace perch {

enum class Regime { FreeFlight, Perched };

/// Which hinge coordinates the integrator may move.
struct HingeFreedoms {
  bool theta_free = false;
  bool slide_free = false;
  bool operator==(const HingeFreedoms&) const = default;
};

struct ConstraintRegime {
  Regime regime = Regime::FreeFlight;
  HingeFreedoms freedoms{};
};

struct DynamicsModel {
  RobotParams robot;
  Environment env;
  RotorModel rotors;

  static DynamicsModel from(const ParameterSet& params);
};

struct StepDiagnostics {
  double contact_force = 0.0;       // tool on wall, N (feed force)
  double gross_feed_thrust = 0.0;   // rotor force along x_A, N
  Vec3 attachment_load = Vec3::Zero();  // force the body puts on F_A, expressed in F_A
  bool rotor_saturated = false;
  bool slide_at_wall = false;
};

inline constexpr double kMaxStep = 0.005;

/// Slide value at which the tooltip reaches the hole bottom for this state.
double slide_at_wall(const SimState& state, const RobotParams& params);

/// Tooltip position along x_A for the given hinge coordinates.
double tooltip_depth(double theta, double slide, const Vec2& gantry_pos, const RobotParams& params);

/// Signed distance of each cup face from the wall plane (positive in free space).
std::array<double, kCupCount> cup_gaps(const SimState& state, const DynamicsModel& model);
/// Approach speed of the cups toward the wall (positive when closing).
double cup_approach_speed(const SimState& state, const DynamicsModel& model);

/// Fixed-step semi-implicit update of rotors and body for one regime.
SimState step(const SimState& state, const Vec4& rotor_cmds, const ConstraintRegime& regime,
              double dt, const DynamicsModel& model, StepDiagnostics* diagnostics = nullptr);

/// Total mechanical energy (kinetic + gravitational) in free flight.
double mechanical_energy(const SimState& state, const DynamicsModel& model);

}  // namespace perch

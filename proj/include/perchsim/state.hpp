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
#include <string>
#include <string_view>

#include "perchsim/types.hpp"

namespace perch {

/// Position plus unit quaternion rotating frame coordinates into the parent.
struct Pose {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();

  Eigen::Isometry3d isometry() const;
  static Pose from_isometry(const Eigen::Isometry3d& iso);
  bool is_normalized(double tol = 1e-9) const {
    return std::abs(orientation.norm() - 1.0) <= tol;
  }
};

struct SimState {
  double time = 0.0;

  Pose body_pose;                            // F_W <- F_B
  Vec3 linear_velocity = Vec3::Zero();       // of O_B, world frame
  Vec3 angular_velocity = Vec3::Zero();      // body frame

  double hinge_theta = 0.0;                  // rad, [0, pi/2]
  double hinge_slide = 0.0;                  // m, along x_A
  double hinge_theta_rate = 0.0;
  double hinge_slide_rate = 0.0;

  Vec4 rotor_speeds = Vec4::Zero();          // rpm, signed
  std::array<double, kCupCount> cup_pressures{};  // Pa below ambient
  std::array<bool, kCupCount> attached{};

  Vec2 gantry_pos = Vec2::Zero();            // p_BT^xy
  double drill_depth = 0.0;

  Pose attachment_pose;                      // F_W <- F_A, fixed while perched

  bool both_attached() const { return attached[0] && attached[1]; }
  bool any_attached() const { return attached[0] || attached[1]; }
};

// Line-oriented `key value...` text; doubles use shortest round-trip form.
std::string serialize(const SimState& state);
SimState deserialize(std::string_view text);

// Exact field-wise comparison (bit equality of every double).
bool bitwise_equal(const SimState& a, const SimState& b);

}  // namespace perch

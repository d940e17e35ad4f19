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

#include "perchsim/params.hpp"
#include "perchsim/state.hpp"

namespace perch {

// F_W world (z up), F_B body at the flight COM (FLU), F_A attachment centred
// between the cups (x_A into the wall), F_T at the tooltip with F_B axes.
enum class Frame : int { World = 0, Body = 1, Attachment = 2, Tool = 3 };

Frame frame_from_id(int id);
const char* frame_name(Frame frame);

// Hinge rotation about y_B: columns are the F_B axes expressed in F_A.
Mat3 hinge_rotation(double theta);

Eigen::Isometry3d body_in_attachment(double theta, double slide, const RobotParams& params);
Eigen::Isometry3d attachment_in_body(double theta, double slide, const RobotParams& params);
Eigen::Isometry3d tool_in_body(const Vec2& gantry_pos, const RobotParams& params);

// Pose of `frame` in F_W for the given state.
Eigen::Isometry3d frame_in_world(const SimState& state, Frame frame, const RobotParams& params);

Vec3 frame_transform(const SimState& state, Frame from, Frame to, const Vec3& point,
                     const RobotParams& params);

/// Attachment pose implied by a free-flying body with the hinge at zero.
Pose attachment_from_body(const Pose& body, const RobotParams& params);
/// Body pose implied by a fixed attachment and hinge coordinates.
Pose body_from_attachment(const Pose& attachment, double theta, double slide,
                          const RobotParams& params);

Vec3 cup_in_attachment(int cup, const RobotParams& params);

/// Body-frame COM shift caused by moving the tool away from its flight position.
Vec3 com_offset(const Vec2& gantry_pos, const RobotParams& params);

}  // namespace perch

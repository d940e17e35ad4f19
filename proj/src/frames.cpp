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

#include "perchsim/frames.hpp"

namespace perch {

Frame frame_from_id(int id) {
  if (id < 0 || id > 3) throw ContractViolation("unknown frame id " + std::to_string(id));
  return static_cast<Frame>(id);
}

const char* frame_name(Frame frame) {
  switch (frame) {
    case Frame::World: return "W";
    case Frame::Body: return "B";
    case Frame::Attachment: return "A";
    case Frame::Tool: return "T";
  }
  throw ContractViolation("unknown frame");
}

Mat3 hinge_rotation(double theta) {
  return Eigen::AngleAxisd(theta, Vec3::UnitY()).toRotationMatrix();
}

Eigen::Isometry3d body_in_attachment(double theta, double slide, const RobotParams& params) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  const Mat3 r = hinge_rotation(theta);
  t.linear() = r;
  t.translation() = params.hinge_in_attachment + slide * Vec3::UnitX() - r * params.hinge_in_body;
  return t;
}

Eigen::Isometry3d attachment_in_body(double theta, double slide, const RobotParams& params) {
  return body_in_attachment(theta, slide, params).inverse(Eigen::Isometry);
}

Eigen::Isometry3d tool_in_body(const Vec2& gantry_pos, const RobotParams& params) {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.translation() = Vec3(gantry_pos.x(), gantry_pos.y(), 0.0) + params.tooltip_offset;
  return t;
}

Eigen::Isometry3d frame_in_world(const SimState& state, Frame frame, const RobotParams& params) {
  switch (frame) {
    case Frame::World:
      return Eigen::Isometry3d::Identity();
    case Frame::Body:
      return state.body_pose.isometry();
    case Frame::Attachment:
      return state.body_pose.isometry() *
             attachment_in_body(state.hinge_theta, state.hinge_slide, params);
    case Frame::Tool:
      return state.body_pose.isometry() * tool_in_body(state.gantry_pos, params);
  }
  throw ContractViolation("unknown frame");
}

Vec3 frame_transform(const SimState& state, Frame from, Frame to, const Vec3& point,
                     const RobotParams& params) {
  if (from == to) return point;
  const Eigen::Isometry3d world_from = frame_in_world(state, from, params);
  const Eigen::Isometry3d world_to = frame_in_world(state, to, params);
  return world_to.inverse(Eigen::Isometry) * (world_from * point);
}

Pose attachment_from_body(const Pose& body, const RobotParams& params) {
  return Pose::from_isometry(body.isometry() * attachment_in_body(0.0, 0.0, params));
}

Pose body_from_attachment(const Pose& attachment, double theta, double slide,
                          const RobotParams& params) {
  return Pose::from_isometry(attachment.isometry() * body_in_attachment(theta, slide, params));
}

Vec3 cup_in_attachment(int cup, const RobotParams& params) {
  require(cup >= 0 && cup < kCupCount, "cup index out of range");
  const double half = 0.5 * params.cup_spacing;
  return Vec3(0.0, cup == 0 ? -half : half, 0.0);
}

Vec3 com_offset(const Vec2& gantry_pos, const RobotParams& params) {
  const Vec2 shift = gantry_pos - params.gantry_flight_position();
  const double fraction = params.mass_tool / params.total_static_mass();
  return params.com_offset_flight + fraction * Vec3(shift.x(), shift.y(), 0.0);
}

}  // namespace perch

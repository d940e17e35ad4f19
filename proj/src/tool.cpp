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

#include "perchsim/tool.hpp"

#include <algorithm>
#include <cmath>

#include "perchsim/types.hpp"

namespace perch {

namespace {

Vec2 half_extent(const RobotParams& p) { return 0.5 * p.gantry_workspace; }

Vec2 clamp_to_workspace(const Vec2& v, const RobotParams& p) {
  const Vec2 lo = p.gantry_center - half_extent(p);
  const Vec2 hi = p.gantry_center + half_extent(p);
  return Vec2(std::clamp(v.x(), lo.x(), hi.x()), std::clamp(v.y(), lo.y(), hi.y()));
}

}  // namespace

GantryState make_gantry(const Vec2& tool_pos, const RobotParams& params) {
  GantryState g;
  g.tool = tool_pos;
  g.motor = tool_pos + Vec2::Constant(0.5 * params.gantry_backlash);
  g.target = g.motor;
  return g;
}

bool in_workspace(const Vec2& p, const RobotParams& params, double tol) {
  const Vec2 d = (p - params.gantry_center).cwiseAbs() - half_extent(params);
  return d.x() <= tol && d.y() <= tol;
}

std::optional<std::string> set_gantry_target(GantryState& gantry, const Vec2& target,
                                             const RobotParams& params) {
  if (!std::isfinite(target.x()) || !std::isfinite(target.y())) return "target is not finite";
  if (!in_workspace(target, params, 1e-9)) return "target outside gantry workspace";
  gantry.target = target;
  return std::nullopt;
}

GantryState gantry_step(const GantryState& gantry, double dt, const RobotParams& params) {
  require(dt > 0.0, "dt must be positive");
  require(in_workspace(gantry.target, params, 1e-9), "gantry target outside workspace");
  GantryState g = gantry;
  const Vec2 delta = g.target - g.motor;
  const double dist = delta.norm();
  const double reach = params.gantry_speed_limit * dt;
  if (dist <= reach) {
    g.motor = g.target;
  } else {
    g.motor += delta * (reach / dist);
  }
  const double half = 0.5 * params.gantry_backlash;
  for (int i = 0; i < 2; ++i) {
    if (g.motor[i] - g.tool[i] > half) g.tool[i] = g.motor[i] - half;
    if (g.tool[i] - g.motor[i] > half) g.tool[i] = g.motor[i] + half;
  }
  g.tool = clamp_to_workspace(g.tool, params);
  return g;
}

WallFrame WallFrame::from(const Environment& env) {
  WallFrame f;
  const Vec3 n = env.wall_normal.normalized();
  Vec3 up = Vec3::UnitZ() - n.dot(Vec3::UnitZ()) * n;
  require(up.norm() > 1e-6, "wall must not be horizontal");
  up.normalize();
  f.origin = env.wall_point;
  f.v_axis = up;
  f.u_axis = up.cross(n);  // operator's right when facing the wall
  return f;
}

Vec2 WallFrame::project(const Vec3& world) const {
  const Vec3 d = world - origin;
  return Vec2(d.dot(u_axis), d.dot(v_axis));
}

Vec3 WallFrame::lift(const Vec2& uv) const { return origin + uv.x() * u_axis + uv.y() * v_axis; }

PixelObservation observe_laser_cross(const Vec2& tool_uv, const SensingModel& model,
                                     std::mt19937_64* rng) {
  Vec2 cross = tool_uv + model.laser_offset;
  if (model.pointing_noise_sigma > 0.0 && rng != nullptr) {
    std::normal_distribution<double> noise(0.0, model.pointing_noise_sigma);
    cross.x() += noise(*rng);
    cross.y() += noise(*rng);
  }
  PixelObservation obs;
  obs.pixel = cross / model.pixel_pitch;
  if (model.quantize) obs.pixel = obs.pixel.array().round();
  const Vec2 half = 0.5 * model.camera_resolution.cast<double>();
  obs.visible = std::abs(obs.pixel.x()) <= half.x() && std::abs(obs.pixel.y()) <= half.y();
  return obs;
}

Vec2 tool_from_pixel(const Vec2& pixel, const SensingModel& model) {
  return pixel * model.pixel_pitch - model.laser_offset;
}

double effective_min_feed(const ToolSpec& tool, const Material& material) {
  return std::max(tool.min_feed_force, material.min_feed_force);
}

double drill_step(double feed_force, const ToolSpec& tool, const Material& material, double depth,
                  double dt) {
  const double threshold = effective_min_feed(tool, material);
  if (feed_force <= threshold) return depth;
  const double rate = tool.drill_rate_coeff * (feed_force - threshold);
  return std::min(depth + rate * dt, tool.max_depth);
}

Vec2 hole_position(const HoleErrorBreakdown& h) {
  return h.target + h.alignment + h.backlash + h.slip + h.drift + h.jitter;
}

Vec2 imbalance_drift(const Vec4& thrust_gains, double feed_thrust_per_rotor,
                     const RobotParams& params, const HoleNoise& noise) {
  const std::array<Vec2, kRotorCount> arm{Vec2(params.rotor_arm_x, params.rotor_arm_y),
                                          Vec2(params.rotor_arm_x, -params.rotor_arm_y),
                                          Vec2(-params.rotor_arm_x, params.rotor_arm_y),
                                          Vec2(-params.rotor_arm_x, -params.rotor_arm_y)};
  double roll = 0.0;
  double pitch = 0.0;
  for (int i = 0; i < kRotorCount; ++i) {
    const double df = (thrust_gains[i] - 1.0) * feed_thrust_per_rotor;
    roll += arm[i].y() * df;
    pitch -= arm[i].x() * df;
  }
  // Body x maps to wall -v and body y to wall -u in the tilted posture.
  return noise.imbalance_drift_gain * Vec2(roll, -pitch);
}

}  // namespace perch

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

#include "perchsim/rotor.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

RotorModel RotorModel::from_params(const RobotParams& p) {
  RotorModel m;
  m.k_f = p.rotor_thrust_coeff;
  m.k_tau = p.rotor_drag_ratio * p.rotor_thrust_coeff;
  m.k_p = p.rotor_power_coeff;
  m.avionics_power = p.avionics_power;
  m.speed_limit = p.rotor_speed_limit;
  m.positions = {Vec3(p.rotor_arm_x, p.rotor_arm_y, p.rotor_height),
                 Vec3(p.rotor_arm_x, -p.rotor_arm_y, p.rotor_height),
                 Vec3(-p.rotor_arm_x, p.rotor_arm_y, p.rotor_height),
                 Vec3(-p.rotor_arm_x, -p.rotor_arm_y, p.rotor_height)};
  return m;
}

RotorAnchors default_anchors(const RobotParams& params, const Environment& env) {
  RotorAnchors anchors;
  anchors.thrust.push_back({3000.0, 110.0, kRotorCount});
  const double k_f = 110.0 / (kRotorCount * 3000.0 * 3000.0);
  const double weight = total_mass(params, 0.0) * env.gravity;
  const double hover = std::sqrt(weight / (kRotorCount * k_f));
  anchors.power.push_back({Vec4::Constant(hover), 2000.0});
  return anchors;
}

RotorModel calibrate_rotor_coeffs(const RotorAnchors& anchors, const RobotParams& base) {
  if (anchors.thrust.empty() || anchors.power.empty()) {
    throw ContractViolation("calibration needs at least one thrust and one power anchor");
  }
  // total_force = k_f * (rotors * rpm^2)
  double sxy = 0.0, sxx = 0.0;
  for (const auto& a : anchors.thrust) {
    const double x = a.rotors * a.rpm * a.rpm;
    sxy += x * a.total_force;
    sxx += x * x;
  }
  require(sxx > 0.0, "thrust anchors must have non-zero speed");

  RobotParams fitted = base;
  fitted.rotor_thrust_coeff = sxy / sxx;

  // watts - avionics = k_p * sum |rpm|^3
  sxy = sxx = 0.0;
  for (const auto& a : anchors.power) {
    const double x = a.rpm.cwiseAbs().array().cube().sum();
    sxy += x * (a.watts - base.avionics_power);
    sxx += x * x;
  }
  require(sxx > 0.0, "power anchors must have non-zero speed");
  fitted.rotor_power_coeff = sxy / sxx;
  return RotorModel::from_params(fitted);
}

SaturatedCommand saturate(const Vec4& cmd, const RotorModel& model, bool allow_back_reversal) {
  SaturatedCommand out;
  for (int i = 0; i < kRotorCount; ++i) {
    const bool may_reverse = model.reversible[i] || allow_back_reversal;
    const double lo = may_reverse ? -model.speed_limit : 0.0;
    const double v = std::clamp(cmd[i], lo, model.speed_limit);
    if (v != cmd[i]) out.saturated = true;
    out.rpm[i] = v;
  }
  return out;
}

Vec6 rotor_wrench(const Vec4& rpm, const RotorModel& model) {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
  for (int i = 0; i < kRotorCount; ++i) {
    const double w = std::clamp(rpm[i], -model.speed_limit, model.speed_limit);
    const Vec3 f(0.0, 0.0, model.thrust(w));
    force += f;
    torque += model.positions[i].cross(f);
    torque.z() += model.drag_torque(i, w);
  }
  Vec6 wrench;
  wrench << force, torque;
  return wrench;
}

double power_draw(const Vec4& rpm, const RotorModel& model) {
  double watts = model.avionics_power;
  for (int i = 0; i < kRotorCount; ++i) watts += model.power(rpm[i]);
  return watts;
}

double hover_speed(const RotorModel& model, double weight_newton) {
  return std::sqrt(weight_newton / (kRotorCount * model.k_f));
}

}  // namespace perch

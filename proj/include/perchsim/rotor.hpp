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
#include <vector>

#include "perchsim/params.hpp"

namespace perch {

/// Quadratic thrust/drag and cubic power model for the H-configuration.
/// thrust(w) = sign(w) k_f w^2, power(w) = k_p |w|^3.
struct RotorModel {
  double k_f = 0.0;    // N/rpm^2
  double k_tau = 0.0;  // N m/rpm^2
  double k_p = 0.0;    // W/rpm^3
  double avionics_power = 0.0;
  double speed_limit = 0.0;
  std::array<int, kRotorCount> spin_directions{1, -1, -1, 1};
  std::array<Vec3, kRotorCount> positions{};
  std::array<bool, kRotorCount> reversible{true, true, false, false};

  static RotorModel from_params(const RobotParams& params);

  double thrust(double rpm) const { return (rpm < 0 ? -1.0 : 1.0) * k_f * rpm * rpm; }
  // Reaction yaw torque on the body, about +z_B.
  double drag_torque(int rotor, double rpm) const {
    return -spin_directions[rotor] * (rpm < 0 ? -1.0 : 1.0) * k_tau * rpm * rpm;
  }
  double power(double rpm) const { return k_p * std::abs(rpm * rpm * rpm); }
};

struct ThrustAnchor {
  double rpm;          // per rotor
  double total_force;  // N over all listed rotors
  int rotors = kRotorCount;
};

struct PowerAnchor {
  Vec4 rpm;
  double watts;
};

struct RotorAnchors {
  std::vector<ThrustAnchor> thrust;
  std::vector<PowerAnchor> power;
};

/// 110 N at 3000 rpm on four rotors, and 2 kW at the hover speed that
/// follows from that thrust fit and the vehicle weight.
RotorAnchors default_anchors(const RobotParams& params, const Environment& env);

/// Least-squares fit of k_f then k_p through the anchors. Geometry and
/// limits are copied from `base`.
RotorModel calibrate_rotor_coeffs(const RotorAnchors& anchors, const RobotParams& base);

struct SaturatedCommand {
  Vec4 rpm = Vec4::Zero();
  bool saturated = false;
};

/// Clamp to the speed limit; back-pair reversal only when allowed.
SaturatedCommand saturate(const Vec4& cmd, const RotorModel& model, bool allow_back_reversal);

/// Force and torque in F_B about O_B, stacked [f; tau].
Vec6 rotor_wrench(const Vec4& rpm, const RotorModel& model);

double power_draw(const Vec4& rpm, const RotorModel& model);

double hover_speed(const RotorModel& model, double weight_newton);

}  // namespace perch

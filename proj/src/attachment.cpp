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

#include "perchsim/attachment.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

CupPair update_suction(const CupPair& cups, const std::array<double, kCupCount>& wall_gaps,
                       double approach_speed, double dt, const RobotParams& params) {
  require(dt > 0.0, "dt must be positive");
  const double threshold = params.attach_fraction * params.vacuum_max;
  CupPair next = cups;
  for (int i = 0; i < kCupCount; ++i) {
    auto& cup = next[i];
    if (!cup.attached) {
      cup.contact = wall_gaps[i] <= params.contact_gap && approach_speed <= params.contact_speed;
    }
    if (cup.valve_open) {
      cup.pressure_deficit *= std::exp(-dt / params.valve_release_time_constant);
    } else if (!cup.contact) {
      cup.pressure_deficit = 0.0;
    } else if (cup.pump_on) {
      const double gap = params.vacuum_max - cup.pressure_deficit;
      cup.pressure_deficit = params.vacuum_max - gap * std::exp(-dt / params.pump_time_constant);
    }
    cup.pressure_deficit = std::clamp(cup.pressure_deficit, 0.0, params.vacuum_max);
    cup.attached = cup.contact && cup.pressure_deficit >= threshold;
    if (!cup.attached && wall_gaps[i] > params.contact_gap) cup.contact = false;
  }
  return next;
}

HoldingResult holding_wrench(const CupPair& cups, double mu, const Vec3& load,
                             const RobotParams& params) {
  if (!cups[0].attached || !cups[1].attached) {
    throw ContractViolation("holding_wrench requires both cups attached");
  }
  HoldingResult r;
  for (const auto& cup : cups) r.capacity += cup.pressure_deficit * params.cup_area();
  r.tension = -load.x();
  r.shear = std::hypot(load.y(), load.z());
  r.pull_off = r.tension > r.capacity;
  r.normal = r.pull_off ? 0.0 : r.capacity - r.tension;
  r.slips = r.shear > mu * r.normal;
  r.critical_mu = r.normal > 0.0 ? r.shear / r.normal : INFINITY;
  return r;
}

Vec3 slip_displacement(const HoldingResult& hold, const Vec3& load, double mu, double dt,
                       const RobotParams& params) {
  if (!hold.slips || hold.shear <= 0.0) return Vec3::Zero();
  const double excess = hold.shear - mu * hold.normal;
  const Vec3 direction(0.0, load.y() / hold.shear, load.z() / hold.shear);
  return params.slip_rate_coeff * excess * dt * direction;
}

const char* to_string(HingeLockState state) {
  switch (state) {
    case HingeLockState::Locked: return "Locked";
    case HingeLockState::Released: return "Released";
    case HingeLockState::RotationLocked: return "RotationLocked";
  }
  return "?";
}

LockResult set_hinge_lock(HingeLockState current, HingeLockState request, double theta,
                          double slide, const RobotParams& params) {
  LockResult r{current, false, {}};
  if (current == request) {
    r.granted = true;
    return r;
  }
  const bool neighbours = current == HingeLockState::Released || request == HingeLockState::Released;
  if (!neighbours) {
    r.reason = std::string("pins cannot move directly from ") + to_string(current) + " to " +
               to_string(request);
    return r;
  }
  if (request == HingeLockState::RotationLocked &&
      std::abs(theta - 0.5 * kPi) > params.engage_tolerance_theta) {
    r.reason = "rotation lock needs theta within tolerance of 90 deg";
    return r;
  }
  if (request == HingeLockState::Locked &&
      (std::abs(theta) > params.engage_tolerance_theta ||
       std::abs(slide) > params.engage_tolerance_slide)) {
    r.reason = "full lock needs theta near 0 deg and slide retracted";
    return r;
  }
  r.state = request;
  r.granted = true;
  return r;
}

HingeFreedoms freedoms_of(HingeLockState state) {
  switch (state) {
    case HingeLockState::Locked: return {false, false};
    case HingeLockState::Released: return {true, true};
    case HingeLockState::RotationLocked: return {false, true};
  }
  return {};
}

}  // namespace perch

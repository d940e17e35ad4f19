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

#include <cstdint>
#include <random>

#include "perchsim/attachment.hpp"
#include "perchsim/dynamics.hpp"

namespace perch {

/// Operator reference. Velocity is expressed in the heading frame (x forward,
/// z up) so that "forward" means toward the wall when facing it.
struct FlightReference {
  Vec3 velocity = Vec3::Zero();
  double heading = 0.0;
};

struct Odometry {
  Vec3 position = Vec3::Zero();
  Vec3 velocity = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 angular_velocity = Vec3::Zero();
};

/// Stand-in for the VIO sensor: ground truth plus optional zero-mean noise
/// and a slowly walking velocity bias.
class OdometrySource {
 public:
  OdometrySource(OdometryNoise noise, std::uint64_t seed);
  Odometry measure(const SimState& state, double dt);
  void reset_bias() { bias_.setZero(); }
  const Vec3& bias() const { return bias_; }

 private:
  OdometryNoise noise_;
  std::mt19937_64 rng_;
  Vec3 bias_ = Vec3::Zero();
};

/// Rotor thrust -> [collective, tau_x, tau_y, tau_z] about `com`, and inverse.
struct Mixer {
  Eigen::Matrix4d allocation;
  Eigen::Matrix4d mixing;
};

Mixer make_mixer(const RotorModel& model, const Vec3& com);

struct FlightControlOutput {
  Vec4 rpm = Vec4::Zero();
  bool saturated = false;
  Vec4 requested_wrench = Vec4::Zero();  // collective, torques
};

/// Cascaded PD: velocity -> attitude -> body rate -> torque, then mixing.
/// Holds the previous errors for the derivative terms.
class FlightController {
 public:
  FlightController(ControllerGains gains, const RobotParams& robot, const RotorModel& rotors,
                   double gravity);

  FlightControlOutput update(const Odometry& odom, const FlightReference& ref, double dt);
  void reset();

  double hover_rpm() const { return hover_rpm_; }
  const Mixer& mixer() const { return mixer_; }

 private:
  ControllerGains gains_;
  RotorModel rotors_;
  Mixer mixer_;
  double mass_;
  double gravity_;
  Mat3 inertia_;
  double hover_rpm_;
  bool primed_ = false;
  Vec3 prev_velocity_error_ = Vec3::Zero();
  Vec3 prev_attitude_error_ = Vec3::Zero();
  Vec3 prev_rate_error_ = Vec3::Zero();
};

/// Per-rotor speeds for a thrust vector; negative thrust maps to reverse spin.
Vec4 rpm_for_thrusts(const Vec4& thrusts, const RotorModel& model);

/// Open-loop tilt: back pair off, front pair reversed in proportion to throttle.
/// Throws ContractViolation unless perched with the hinge released.
Vec4 rotation_control(double throttle, Regime regime, HingeLockState lock, const RotorModel& model);

enum class FeedDirection { Advance, Retract };

/// Symmetric feed: four equal speeds, reversed to retract.
/// Throws ContractViolation unless perched and rotation-locked.
Vec4 feed_control(double throttle, FeedDirection direction, Regime regime, HingeLockState lock,
                  const RotorModel& model);

/// Pure pitch couple used to tilt the table back toward 0 deg: front pair
/// forward, back pair reversed.
Vec4 rotate_back_command(double throttle, const RotorModel& model);

}  // namespace perch

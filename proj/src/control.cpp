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

#include "perchsim/control.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

OdometrySource::OdometrySource(OdometryNoise noise, std::uint64_t seed)
    : noise_(noise), rng_(seed) {}

Odometry OdometrySource::measure(const SimState& s, double dt) {
  Odometry o;
  o.position = s.body_pose.position;
  o.velocity = s.linear_velocity;
  o.orientation = s.body_pose.orientation;
  o.angular_velocity = s.angular_velocity;
  if (!noise_.enabled) return o;
  std::normal_distribution<double> unit(0.0, 1.0);
  const double walk = noise_.bias_walk_sigma * std::sqrt(dt);
  for (int i = 0; i < 3; ++i) {
    bias_[i] += walk * unit(rng_);
    o.position[i] += noise_.position_sigma * unit(rng_);
    o.velocity[i] += noise_.velocity_sigma * unit(rng_) + bias_[i];
  }
  return o;
}

Mixer make_mixer(const RotorModel& model, const Vec3& com) {
  Mixer m;
  const double drag_ratio = model.k_tau / model.k_f;
  for (int i = 0; i < kRotorCount; ++i) {
    const Vec3 r = model.positions[i] - com;
    m.allocation(0, i) = 1.0;
    m.allocation(1, i) = r.y();
    m.allocation(2, i) = -r.x();
    m.allocation(3, i) = -model.spin_directions[i] * drag_ratio;
  }
  m.mixing = m.allocation.inverse();
  return m;
}

Vec4 rpm_for_thrusts(const Vec4& thrusts, const RotorModel& model) {
  Vec4 rpm;
  for (int i = 0; i < kRotorCount; ++i) {
    const double t = thrusts[i];
    rpm[i] = (t < 0 ? -1.0 : 1.0) * std::sqrt(std::abs(t) / model.k_f);
  }
  return rpm;
}

FlightController::FlightController(ControllerGains gains, const RobotParams& robot,
                                   const RotorModel& rotors, double gravity)
    : gains_(gains),
      rotors_(rotors),
      mixer_(make_mixer(rotors, robot.com_offset_flight)),
      mass_(robot.total_static_mass()),
      gravity_(gravity),
      inertia_(robot.inertia_diag.asDiagonal()),
      hover_rpm_(hover_speed(rotors, robot.total_static_mass() * gravity)) {}

void FlightController::reset() {
  primed_ = false;
  prev_velocity_error_.setZero();
  prev_attitude_error_.setZero();
  prev_rate_error_.setZero();
}

namespace {

Vec3 vee(const Mat3& m) { return Vec3(m(2, 1), m(0, 2), m(1, 0)); }

}  // namespace

FlightControlOutput FlightController::update(const Odometry& odom, const FlightReference& ref,
                                             double dt) {
  const Mat3 rot = odom.orientation.toRotationMatrix();

  // Velocity stage.
  Vec3 v_ref = Eigen::AngleAxisd(ref.heading, Vec3::UnitZ()) * ref.velocity;
  if (v_ref.norm() > gains_.max_velocity) v_ref *= gains_.max_velocity / v_ref.norm();
  const Vec3 ev = v_ref - odom.velocity;
  const Vec3 dev = primed_ ? Vec3((ev - prev_velocity_error_) / dt) : Vec3::Zero();
  Vec3 acc = gains_.velocity_p * ev + gains_.velocity_d * dev;

  Vec3 force = mass_ * (acc + Vec3(0.0, 0.0, gravity_));
  force.z() = std::max(force.z(), 0.1 * mass_ * gravity_);
  const double max_lateral = force.z() * std::tan(gains_.max_tilt);
  const double lateral = force.head<2>().norm();
  if (lateral > max_lateral) force.head<2>() *= max_lateral / lateral;

  // Attitude stage.
  const Vec3 z_des = force.normalized();
  const Vec3 x_heading(std::cos(ref.heading), std::sin(ref.heading), 0.0);
  const Vec3 y_des = z_des.cross(x_heading).normalized();
  const Vec3 x_des = y_des.cross(z_des);
  Mat3 rot_des;
  rot_des << x_des, y_des, z_des;
  const Vec3 er = 0.5 * vee(rot_des.transpose() * rot - rot.transpose() * rot_des);
  const Vec3 der = primed_ ? Vec3((er - prev_attitude_error_) / dt) : Vec3::Zero();
  Vec3 rate_ref = -gains_.attitude_p * er - gains_.attitude_d * der;
  rate_ref.z() = -gains_.yaw_p * er.z();

  // Rate stage.
  const Vec3 ew = rate_ref - odom.angular_velocity;
  const Vec3 dew = primed_ ? Vec3((ew - prev_rate_error_) / dt) : Vec3::Zero();
  const Vec3 alpha = gains_.rate_p * ew + gains_.rate_d * dew;
  const Vec3 torque = inertia_ * alpha + odom.angular_velocity.cross(inertia_ * odom.angular_velocity);

  prev_velocity_error_ = ev;
  prev_attitude_error_ = er;
  prev_rate_error_ = ew;
  primed_ = true;

  FlightControlOutput out;
  const double collective = force.dot(rot.col(2));
  out.requested_wrench << collective, torque;
  Vec4 thrusts = mixer_.mixing * out.requested_wrench;
  for (int i = 0; i < kRotorCount; ++i) {
    if (thrusts[i] < 0.0) {
      thrusts[i] = 0.0;
      out.saturated = true;
    }
  }
  const SaturatedCommand sat = saturate(rpm_for_thrusts(thrusts, rotors_), rotors_, false);
  out.rpm = sat.rpm;
  out.saturated = out.saturated || sat.saturated;
  return out;
}

Vec4 rotation_control(double throttle, Regime regime, HingeLockState lock, const RotorModel& model) {
  if (regime != Regime::Perched || lock != HingeLockState::Released) {
    throw ContractViolation("rotation control needs a perched robot with released hinge");
  }
  const double t = std::clamp(throttle, 0.0, 1.0);
  const double front = -t * model.speed_limit;
  return Vec4(front, front, 0.0, 0.0);
}

Vec4 feed_control(double throttle, FeedDirection direction, Regime regime, HingeLockState lock,
                  const RotorModel& model) {
  if (regime != Regime::Perched || lock != HingeLockState::RotationLocked) {
    throw ContractViolation("feed control needs a perched robot with rotation-locked hinge");
  }
  const double t = std::clamp(throttle, 0.0, 1.0);
  const double w = (direction == FeedDirection::Advance ? 1.0 : -1.0) * t * model.speed_limit;
  return Vec4::Constant(w);
}

Vec4 rotate_back_command(double throttle, const RotorModel& model) {
  const double w = std::clamp(throttle, 0.0, 1.0) * model.speed_limit;
  return Vec4(w, w, -w, -w);
}

}  // namespace perch

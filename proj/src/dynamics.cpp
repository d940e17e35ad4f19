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

#include "perchsim/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

namespace {

constexpr double kRestSpeed = 1e-9;
constexpr double kStopTol = 1e-12;

double sign(double v) { return v < 0.0 ? -1.0 : 1.0; }

Vec4 lag_rotors(const Vec4& speeds, const Vec4& cmd, double dt, double tau) {
  const double blend = tau > 0.0 ? 1.0 - std::exp(-dt / tau) : 1.0;
  return speeds + blend * (cmd - speeds);
}

Quat integrate_orientation(const Quat& q, const Vec3& omega_body, double dt) {
  const double angle = omega_body.norm() * dt;
  if (angle <= 0.0) return q;
  return (q * Quat(Eigen::AngleAxisd(angle, omega_body.normalized()))).normalized();
}

void free_flight(SimState& s, const DynamicsModel& model, double dt) {
  const auto& robot = model.robot;
  const auto& env = model.env;
  const double m = robot.total_static_mass();
  const Vec3 c = com_offset(s.gantry_pos, robot);
  const Mat3 inertia = robot.inertia_diag.asDiagonal();
  const Mat3 rot = s.body_pose.orientation.toRotationMatrix();

  const Vec6 wrench = rotor_wrench(s.rotor_speeds, model.rotors);
  const Vec3 f_body = wrench.head<3>();
  const Vec3 tether_w(0.0, 0.0, -robot.tether_linear_density * env.tether_deployed_length * env.gravity);

  const Vec3 force_w = rot * f_body + Vec3(0.0, 0.0, -m * env.gravity) + tether_w;
  const Vec3 torque_c = Vec3(wrench.tail<3>()) - c.cross(f_body) +
                        (env.tether_attach_point - c).cross(rot.transpose() * tether_w);

  const Vec3 omega = s.angular_velocity;
  const Vec3 v_com = s.linear_velocity + rot * omega.cross(c);
  const Vec3 p_com = s.body_pose.position + rot * c;

  const Vec3 v_com_next = v_com + force_w / m * dt;
  // Mean of old and new velocity: exact for constant force.
  const Vec3 p_com_next = p_com + 0.5 * (v_com + v_com_next) * dt;
  const Vec3 omega_next =
      omega + inertia.inverse() * (torque_c - omega.cross(inertia * omega)) * dt;
  const Quat q_next = integrate_orientation(s.body_pose.orientation, omega_next, dt);
  const Mat3 rot_next = q_next.toRotationMatrix();

  s.body_pose.orientation = q_next;
  s.body_pose.position = p_com_next - rot_next * c;
  s.angular_velocity = omega_next;
  s.linear_velocity = v_com_next - rot_next * omega_next.cross(c);

  // The wall is rigid and inelastic for the cup faces.
  const auto gaps = cup_gaps(s, model);
  const double min_gap = std::min(gaps[0], gaps[1]);
  if (min_gap < 0.0) {
    const Vec3& n = env.wall_normal;
    s.body_pose.position -= min_gap * n;
    const double vn = s.linear_velocity.dot(n);
    if (vn < 0.0) s.linear_velocity -= vn * n;
  }
}

void perched(SimState& s, const HingeFreedoms& freedoms, const DynamicsModel& model, double dt,
             StepDiagnostics& diag) {
  const auto& robot = model.robot;
  const auto& env = model.env;
  const double m = robot.total_static_mass();
  const Mat3 rot_wa = s.attachment_pose.orientation.toRotationMatrix();
  const Mat3 rot = hinge_rotation(s.hinge_theta);
  const Vec3 hinge_b = robot.hinge_in_body;
  const Vec3 d = rot * (com_offset(s.gantry_pos, robot) - hinge_b);

  const Vec6 wrench = rotor_wrench(s.rotor_speeds, model.rotors);
  const Vec3 f_rot = rot * wrench.head<3>();
  const Vec3 tau_rot = rot * wrench.tail<3>();
  const Vec3 g_a = rot_wa.transpose() * Vec3(0.0, 0.0, -env.gravity);
  const Vec3 f_grav = m * g_a;
  const Vec3 f_teth = robot.tether_linear_density * env.tether_deployed_length * g_a;
  const Vec3 r_origin = -rot * hinge_b;
  const Vec3 r_teth = rot * (env.tether_attach_point - hinge_b);

  const Vec3 force = f_rot + f_grav + f_teth;
  const Vec3 torque_hinge =
      tau_rot + r_origin.cross(f_rot) + d.cross(f_grav) + r_teth.cross(f_teth);

  diag.gross_feed_thrust = f_rot.x();

  double theta_rate = freedoms.theta_free ? s.hinge_theta_rate : 0.0;
  double slide_rate = freedoms.slide_free ? s.hinge_slide_rate : 0.0;

  // Generalized coordinates (slide, theta); mass matrix and forcing.
  const double m_pp = m;
  const double m_pt = m * d.z();
  const double m_tt = robot.inertia_diag.y() + m * (d.x() * d.x() + d.z() * d.z());
  const double q_p = force.x() + m * theta_rate * theta_rate * d.x();
  const double q_t = torque_hinge.y();

  bool theta_free = freedoms.theta_free;
  if (theta_free && std::abs(theta_rate) <= kRestSpeed) {
    const double a = q_t / m_tt;
    const bool at_top = s.hinge_theta >= 0.5 * kPi - kStopTol && a > 0.0;
    const bool at_bottom = s.hinge_theta <= kStopTol && a < 0.0;
    if (at_top || at_bottom) theta_free = false;
  }
  if (!theta_free) theta_rate = 0.0;

  const double friction = robot.slide_friction_force;
  const double wall_slide = slide_at_wall(s, robot);
  const double upper = std::min(robot.slide_travel, wall_slide);
  const bool wall_is_upper = wall_slide <= robot.slide_travel;

  double slide_acc = 0.0;
  double theta_acc = 0.0;
  double contact = 0.0;
  if (freedoms.slide_free) {
    const double theta_acc_stuck = theta_free ? q_t / m_tt : 0.0;
    // Force along +x_A the slide must supply to keep the slide still.
    const double lambda = m_pt * theta_acc_stuck - q_p;
    const bool at_lower = s.hinge_slide <= kStopTol;
    const bool at_upper = s.hinge_slide >= upper - kStopTol;
    bool stick = false;
    if (std::abs(slide_rate) <= kRestSpeed) {
      if (at_lower && lambda >= 0.0) {
        stick = true;
      } else if (at_upper && lambda <= 0.0) {
        stick = true;
        if (wall_is_upper) contact = std::max(0.0, -lambda - friction);
      } else if (std::abs(lambda) <= friction) {
        stick = true;
      }
    }
    if (stick) {
      slide_rate = 0.0;
      theta_acc = theta_acc_stuck;
    } else {
      const double f = std::abs(slide_rate) > kRestSpeed ? -sign(slide_rate) * friction
                                                          : sign(lambda) * friction;
      if (theta_free) {
        Eigen::Matrix2d mm;
        mm << m_pp, m_pt, m_pt, m_tt;
        const Eigen::Vector2d acc = mm.ldlt().solve(Eigen::Vector2d(q_p + f, q_t));
        slide_acc = acc.x();
        theta_acc = acc.y();
      } else {
        slide_acc = (q_p + f) / m_pp;
      }
    }
  } else if (theta_free) {
    theta_acc = q_t / m_tt;
  }
  diag.contact_force = contact;
  diag.slide_at_wall = wall_is_upper && s.hinge_slide >= upper - kStopTol;

  // Force the body applies to F_A: everything external minus its inertia.
  const double thr2 = theta_rate * theta_rate;
  const Vec3 com_acc(slide_acc + theta_acc * d.z() - thr2 * d.x(), 0.0,
                     -theta_acc * d.x() - thr2 * d.z());
  diag.attachment_load = force - contact * Vec3::UnitX() - m * com_acc;

  // Semi-implicit update with inelastic stops.
  double slide_rate_next = slide_rate + slide_acc * dt;
  if (slide_rate != 0.0 && slide_rate_next * slide_rate < 0.0) slide_rate_next = 0.0;
  double theta_rate_next = theta_free ? theta_rate + theta_acc * dt : 0.0;
  if (!freedoms.slide_free) slide_rate_next = 0.0;

  double theta = s.hinge_theta + theta_rate_next * dt;
  if (theta >= 0.5 * kPi) {
    theta = 0.5 * kPi;
    theta_rate_next = std::min(theta_rate_next, 0.0);
  } else if (theta <= 0.0) {
    theta = 0.0;
    theta_rate_next = std::max(theta_rate_next, 0.0);
  }
  double slide = s.hinge_slide + slide_rate_next * dt;
  SimState probe = s;
  probe.hinge_theta = theta;
  const double upper_next = std::min(robot.slide_travel, slide_at_wall(probe, robot));
  if (slide >= upper_next) {
    slide = std::max(upper_next, 0.0);
    slide_rate_next = std::min(slide_rate_next, 0.0);
  }
  if (slide <= 0.0) {
    slide = 0.0;
    slide_rate_next = std::max(slide_rate_next, 0.0);
  }

  s.hinge_theta = theta;
  s.hinge_slide = slide;
  s.hinge_theta_rate = theta_rate_next;
  s.hinge_slide_rate = slide_rate_next;

  s.body_pose = body_from_attachment(s.attachment_pose, theta, slide, robot);
  const Vec3 v_a = slide_rate_next * Vec3::UnitX() +
                   theta_rate_next * Vec3::UnitY().cross(-hinge_rotation(theta) * hinge_b);
  s.linear_velocity = rot_wa * v_a;
  s.angular_velocity = Vec3(0.0, theta_rate_next, 0.0);
}

}  // namespace

DynamicsModel DynamicsModel::from(const ParameterSet& params) {
  return DynamicsModel{params.robot, params.env, RotorModel::from_params(params.robot)};
}

double tooltip_depth(double theta, double slide, const Vec2& gantry_pos, const RobotParams& params) {
  const Vec3 tip_b = tool_in_body(gantry_pos, params).translation();
  return (body_in_attachment(theta, slide, params) * tip_b).x();
}

double slide_at_wall(const SimState& state, const RobotParams& params) {
  return state.drill_depth - tooltip_depth(state.hinge_theta, 0.0, state.gantry_pos, params);
}

std::array<double, kCupCount> cup_gaps(const SimState& state, const DynamicsModel& model) {
  const Eigen::Isometry3d world_a = state.body_pose.isometry() *
      attachment_in_body(state.hinge_theta, state.hinge_slide, model.robot);
  std::array<double, kCupCount> gaps{};
  for (int i = 0; i < kCupCount; ++i) {
    const Vec3 cup_w = world_a * cup_in_attachment(i, model.robot);
    gaps[i] = model.env.wall_normal.dot(cup_w - model.env.wall_point);
  }
  return gaps;
}

double cup_approach_speed(const SimState& state, const DynamicsModel& model) {
  const Mat3 rot = state.body_pose.orientation.toRotationMatrix();
  const Vec3 cup_b = attachment_in_body(state.hinge_theta, state.hinge_slide, model.robot).translation();
  const Vec3 v = state.linear_velocity + rot * state.angular_velocity.cross(cup_b);
  return -model.env.wall_normal.dot(v);
}

SimState step(const SimState& state, const Vec4& rotor_cmds, const ConstraintRegime& regime,
              double dt, const DynamicsModel& model, StepDiagnostics* diagnostics) {
  if (!(dt > 0.0 && dt <= kMaxStep)) throw ContractViolation("dt must lie in (0, 5 ms]");
  if (regime.regime == Regime::Perched && !state.both_attached()) {
    throw ContractViolation("perched regime requires both cups attached");
  }
  if (regime.regime == Regime::FreeFlight &&
      (regime.freedoms.theta_free || regime.freedoms.slide_free)) {
    throw ContractViolation("free flight requires a locked hinge");
  }

  StepDiagnostics diag;
  const bool perched_regime = regime.regime == Regime::Perched;
  const SaturatedCommand cmd = saturate(rotor_cmds, model.rotors, perched_regime);
  diag.rotor_saturated = cmd.saturated;

  SimState next = state;
  next.rotor_speeds = lag_rotors(state.rotor_speeds, cmd.rpm, dt, model.robot.rotor_time_constant);
  if (perched_regime) {
    perched(next, regime.freedoms, model, dt, diag);
  } else {
    free_flight(next, model, dt);
  }
  next.time = state.time + dt;
  if (diagnostics) *diagnostics = diag;
  return next;
}

double mechanical_energy(const SimState& s, const DynamicsModel& model) {
  const double m = model.robot.total_static_mass();
  const Vec3 c = com_offset(s.gantry_pos, model.robot);
  const Mat3 rot = s.body_pose.orientation.toRotationMatrix();
  const Vec3 v_com = s.linear_velocity + rot * s.angular_velocity.cross(c);
  const Vec3 p_com = s.body_pose.position + rot * c;
  const Mat3 inertia = model.robot.inertia_diag.asDiagonal();
  return 0.5 * m * v_com.squaredNorm() +
         0.5 * s.angular_velocity.dot(inertia * s.angular_velocity) +
         m * model.env.gravity * p_com.z();
}

}  // namespace perch

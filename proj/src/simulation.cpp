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

#include "perchsim/simulation.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

namespace {

constexpr double kCenterTol = 1e-6;

// Attachment pose flush with the wall: x_A into the wall, z_A up.
Pose flush_attachment(const Pose& attachment, const Environment& env) {
  const Vec3 n = env.wall_normal.normalized();
  Vec3 z = Vec3::UnitZ() - n.dot(Vec3::UnitZ()) * n;
  z.normalize();
  const Vec3 x = -n;
  const Vec3 y = z.cross(x);
  Mat3 r;
  r << x, y, z;
  Pose p;
  p.orientation = Quat(r).normalized();
  p.position = attachment.position - n.dot(attachment.position - env.wall_point) * n;
  return p;
}

}  // namespace

SimState hover_state(const ParameterSet& params, const Vec3& position, double heading) {
  SimState s;
  s.body_pose.position = position;
  s.body_pose.orientation = Quat(Eigen::AngleAxisd(heading, Vec3::UnitZ()));
  const RotorModel rotors = RotorModel::from_params(params.robot);
  s.rotor_speeds =
      Vec4::Constant(hover_speed(rotors, params.robot.total_static_mass() * params.env.gravity));
  s.gantry_pos = params.robot.gantry_flight_position();
  s.attachment_pose = attachment_from_body(s.body_pose, params.robot);
  return s;
}

Simulation::Simulation(ParameterSet params, SimConfig config, std::uint64_t seed)
    : params_(std::move(params)),
      config_(config),
      model_(DynamicsModel::from(params_)),
      wall_(WallFrame::from(params_.env)),
      flight_(params_.gains, params_.robot, model_.rotors, params_.env.gravity),
      odometry_(params_.odometry, seed ^ 0x9e3779b97f4a7c15ULL),
      detach_(params_.procedure, model_.rotors, flight_.hover_rpm(),
              params_.robot.gantry_flight_position(), config.start_heading),
      rng_(seed) {
  params_.validate();
  require(config_.dt > 0.0 && config_.dt <= kMaxStep, "dt must lie in (0, 5 ms]");
  require(config_.telemetry_every >= 1, "telemetry cadence must be positive");
  state_ = hover_state(params_, config_.start_position, config_.start_heading);
  gantry_ = make_gantry(state_.gantry_pos, params_.robot);
  flight_ref_.heading = config_.start_heading;
  trace_.push_back(mode_);
}

void Simulation::log(std::string text) { events_.push_back({state_.time, std::move(text)}); }

void Simulation::fail(std::string reason) {
  if (failure_.empty()) {
    failure_ = reason;
    log("failure " + reason);
  }
}

bool Simulation::depth_goal_reached() const {
  return state_.drill_depth >= params_.procedure.depth_goal - 1e-12;
}

double Simulation::power() const { return power_draw(state_.rotor_speeds, model_.rotors); }

double Simulation::slip_distance() const {
  return std::max(cups_[0].slip_accum, cups_[1].slip_accum);
}

double Simulation::wall_clearance() const {
  const auto gaps = cup_gaps(state_, model_);
  return std::min(gaps[0], gaps[1]);
}

Vec2 Simulation::tool_uv() const {
  return wall_.project(frame_in_world(state_, Frame::Tool, params_.robot).translation());
}

Vec2 Simulation::attachment_uv() const {
  return wall_.project(frame_in_world(state_, Frame::Attachment, params_.robot).translation());
}

PixelObservation Simulation::camera() {
  return observe_laser_cross(tool_uv() - config_.view_center, params_.sensing, &rng_);
}

MissionView Simulation::view() const {
  MissionView v;
  v.time = state_.time;
  v.pumps_on = pumps_on();
  v.valves_open = valves_open();
  v.contact = cups_[0].contact && cups_[1].contact;
  v.attached = state_.both_attached();
  v.any_attached = state_.any_attached();
  v.ramp_down_started = ramp_down_started_;
  v.ramped_down = ramp_down_started_ &&
                  state_.rotor_speeds.cwiseAbs().maxCoeff() <= params_.procedure.ramped_down_rpm;
  v.gantry_centered = gantry_.arrived() &&
                      (gantry_.target - params_.robot.gantry_center).norm() <= kCenterTol;
  v.hinge = hinge_;
  v.theta = state_.hinge_theta;
  v.slide = state_.hinge_slide;
  v.tool_on = tool_on_;
  v.depth_goal_reached = depth_goal_reached();
  v.detach_hover_reached = detach_.hover_thrust_reached();
  v.detach_complete = detach_.complete();
  return v;
}

CommandOutcome Simulation::submit(const OperatorCommand& command) {
  const std::string text = format_command(command);
  const HandleResult r = handle(mode_, command, view(), params_);
  if (!r.accepted()) {
    last_rejection_ = text + ": " + *r.rejection;
    log("rejected " + last_rejection_);
    return {false, *r.rejection};
  }
  log("command " + text);
  for (const Action& a : r.actions) apply(a);
  if (r.mode != mode_) {
    mode_ = r.mode;
    trace_.push_back(mode_);
    if (mode_ == Mode::Flight) {
      ramp_down_started_ = false;
      rotation_throttle_ = feed_throttle_ = 0.0;
      flight_.reset();
    }
    log(std::string("mode ") + to_string(mode_));
  }
  return {true, {}};
}

void Simulation::apply(const Action& action) {
  struct Visitor {
    Simulation& s;
    void operator()(const act::Lock& a) {
      const LockResult r = set_hinge_lock(s.hinge_, a.state, s.state_.hinge_theta,
                                          s.state_.hinge_slide, s.params_.robot);
      if (r.granted) {
        s.hinge_ = r.state;
        s.log(std::string("hinge ") + to_string(s.hinge_));
      } else {
        s.log("hinge request refused: " + r.reason);
      }
    }
    void operator()(const act::Gantry& a) {
      if (auto reason = set_gantry_target(s.gantry_, a.xy, s.params_.robot)) {
        s.log("gantry refused: " + *reason);
      }
    }
    void operator()(const act::PumpsOn& a) {
      for (auto& c : s.cups_) c.pump_on = a.on;
    }
    void operator()(const act::ValvesOpen& a) {
      for (auto& c : s.cups_) c.valve_open = a.open;
    }
    void operator()(const act::Tool& a) { s.tool_on_ = a.on; }
    void operator()(const act::Rotation& a) { s.rotation_throttle_ = a.throttle; }
    void operator()(const act::Feed& a) {
      s.feed_throttle_ = a.throttle;
      s.feed_direction_ = a.direction;
    }
    void operator()(const act::FlightRef& a) {
      s.flight_ref_ = a.ref;
      if (s.mode_ == Mode::Detachment) s.flight_ref_.heading = s.config_.start_heading;
    }
    void operator()(const act::RampDown&) {
      s.ramp_down_started_ = true;
      s.ramp_start_ = s.state_.time;
      s.ramp_from_ = s.state_.rotor_speeds;
      set_gantry_target(s.gantry_, s.params_.robot.gantry_center, s.params_.robot);
    }
    void operator()(const act::StartDetachment& a) {
      s.tool_on_ = false;
      if (a.aborted) s.log("detachment started before depth goal");
      DetachInput in;
      in.time = s.state_.time;
      s.detach_.start(in);
    }
    void operator()(const act::DetachPumpsOff&) {
      if (!s.detach_.operator_pumps_off(s.state_.time)) {
        for (auto& c : s.cups_) c.pump_on = false;
      }
    }
    void operator()(const act::DetachValvesOpen&) {
      if (!s.detach_.operator_valves_open(s.state_.time)) {
        for (auto& c : s.cups_) c.valve_open = true;
      }
    }
  };
  std::visit(Visitor{*this}, action);
}

Vec4 Simulation::rotor_commands(const Odometry& odom) {
  const Regime regime = state_.both_attached() ? Regime::Perched : Regime::FreeFlight;
  switch (mode_) {
    case Mode::Flight:
      return flight_.update(odom, flight_ref_, config_.dt).rpm;
    case Mode::Perching: {
      if (!ramp_down_started_) return flight_.update(odom, flight_ref_, config_.dt).rpm;
      const double t = state_.time - ramp_start_;
      const double frac = std::clamp(1.0 - t / params_.procedure.ramp_down_time, 0.0, 1.0);
      return frac * ramp_from_;
    }
    case Mode::Rotation:
      if (regime != Regime::Perched || hinge_ != HingeLockState::Released) return Vec4::Zero();
      return rotation_control(rotation_throttle_, regime, hinge_, model_.rotors);
    case Mode::Manipulation:
      if (regime != Regime::Perched || hinge_ != HingeLockState::RotationLocked) return Vec4::Zero();
      return feed_control(feed_throttle_, feed_direction_, regime, hinge_, model_.rotors);
    case Mode::Detachment: {
      DetachInput in;
      in.time = state_.time;
      in.theta = state_.hinge_theta;
      in.slide = state_.hinge_slide;
      in.slide_rate = state_.hinge_slide_rate;
      in.theta_rate = state_.hinge_theta_rate;
      in.rotor_speeds = state_.rotor_speeds;
      in.lock = hinge_;
      in.gantry_arrived = gantry_.arrived();
      in.any_attached = state_.any_attached();
      in.wall_clearance = wall_clearance();
      in.tool_on = tool_on_;
      const DetachOutput out = detach_.advance(in);
      if (out.lock_request) {
        const LockResult r = set_hinge_lock(hinge_, *out.lock_request, state_.hinge_theta,
                                            state_.hinge_slide, params_.robot);
        if (r.granted) hinge_ = r.state;
        detach_.lock_result(r, state_.time);
      }
      if (out.gantry_target) set_gantry_target(gantry_, *out.gantry_target, params_.robot);
      if (out.pumps_on) for (auto& c : cups_) c.pump_on = *out.pumps_on;
      if (out.valves_open) for (auto& c : cups_) c.valve_open = *out.valves_open;
      if (out.reset_estimator) {
        odometry_.reset_bias();
        flight_.reset();
      }
      if (out.flight_ref) return flight_.update(odom, *out.flight_ref, config_.dt).rpm;
      return out.rpm.value_or(Vec4::Zero());
    }
  }
  return Vec4::Zero();
}

void Simulation::update_attachment() {
  const bool was_perched = state_.both_attached();
  std::array<double, kCupCount> gaps{};
  double approach = 0.0;
  if (!was_perched) {
    gaps = cup_gaps(state_, model_);
    approach = cup_approach_speed(state_, model_);
  }
  cups_ = update_suction(cups_, gaps, approach, config_.dt, params_.robot);

  if (was_perched && cups_[0].attached && cups_[1].attached) {
    const double mu = cup_friction(params_.robot, params_.env.ambient_temperature);
    const HoldingResult hold = holding_wrench(cups_, mu, diag_.attachment_load, params_.robot);
    if (hold.pull_off) {
      for (auto& c : cups_) {
        c.attached = false;
        c.contact = false;
        c.pressure_deficit = 0.0;
      }
      log("pull_off");
    } else if (hold.slips) {
      const Vec3 d = slip_displacement(hold, diag_.attachment_load, mu, config_.dt, params_.robot);
      state_.attachment_pose.position += state_.attachment_pose.orientation * d;
      for (auto& c : cups_) c.slip_accum += d.norm();
      state_.body_pose = body_from_attachment(state_.attachment_pose, state_.hinge_theta,
                                              state_.hinge_slide, params_.robot);
    }
  }

  for (int i = 0; i < kCupCount; ++i) {
    state_.cup_pressures[i] = cups_[i].pressure_deficit;
    state_.attached[i] = cups_[i].attached;
  }
  const bool now_perched = state_.both_attached();
  if (!was_perched && now_perched) {
    state_.attachment_pose =
        flush_attachment(attachment_from_body(state_.body_pose, params_.robot), params_.env);
    state_.hinge_theta = state_.hinge_slide = 0.0;
    state_.drill_depth = 0.0;
    state_.hinge_theta_rate = state_.hinge_slide_rate = 0.0;
    state_.body_pose = body_from_attachment(state_.attachment_pose, 0.0, 0.0, params_.robot);
    state_.linear_velocity.setZero();
    state_.angular_velocity.setZero();
    log("attached");
  } else if (was_perched && !now_perched) {
    state_.linear_velocity += params_.robot.cup_release_speed * params_.env.wall_normal.normalized();
    log("separated");
    if (hinge_ != HingeLockState::Locked) fail("released from the wall with the hinge unlocked");
  }
}

void Simulation::tick() {
  if (failed()) return;
  const Odometry odom = odometry_.measure(state_, config_.dt);
  Vec4 cmd = rotor_commands(odom);

  ConstraintRegime regime;
  if (state_.both_attached()) {
    // per-rotor thrust error, perched only
    cmd = cmd.cwiseProduct(config_.thrust_gains.cwiseSqrt());
    regime.regime = Regime::Perched;
    regime.freedoms = freedoms_of(hinge_);
  }
  state_ = step(state_, cmd, regime, config_.dt, model_, &diag_);

  gantry_ = gantry_step(gantry_, config_.dt, params_.robot);
  state_.gantry_pos = gantry_.tool;
  if (regime.regime == Regime::Perched) {
    state_.body_pose = body_from_attachment(state_.attachment_pose, state_.hinge_theta,
                                            state_.hinge_slide, params_.robot);
  }

  if (tool_on_ && hinge_ == HingeLockState::RotationLocked && diag_.contact_force > 0.0) {
    const double depth = drill_step(diag_.contact_force, params_.tool, params_.env.material,
                                    state_.drill_depth, config_.dt);
    // The bit stays on the bottom of the hole as material is removed.
    if (diag_.slide_at_wall) {
      state_.hinge_slide =
          std::min(state_.hinge_slide + depth - state_.drill_depth, params_.robot.slide_travel);
    }
    state_.drill_depth = depth;
  }

  if (!failed()) update_attachment();

  const auto& dev = detach_.events();
  for (; detach_events_seen_ < dev.size(); ++detach_events_seen_) {
    log("detach " + dev[detach_events_seen_].name);
  }

  ++ticks_;
  if (sink_ && ticks_ % config_.telemetry_every == 0) sink_(telemetry());
}

void Simulation::run_for(double seconds) {
  const long long n = std::llround(seconds / config_.dt);
  for (long long i = 0; i < n && !failed(); ++i) tick();
}

TelemetryRecord Simulation::telemetry() const {
  TelemetryRecord r;
  r.time = state_.time;
  r.mode = mode_;
  r.hinge = hinge_;
  r.theta_deg = rad2deg(state_.hinge_theta);
  r.slide_mm = 1e3 * state_.hinge_slide;
  r.position = state_.body_pose.position;
  const Quat& q = state_.body_pose.orientation;
  r.orientation_wxyz = Vec4(q.w(), q.x(), q.y(), q.z());
  r.rotor_rpm = state_.rotor_speeds;
  for (int i = 0; i < kCupCount; ++i) {
    r.cup_pressure_kpa[i] = 1e-3 * state_.cup_pressures[i];
    r.attached[i] = state_.attached[i];
  }
  r.pumps_on = pumps_on();
  r.valves_open = valves_open();
  r.feed_force = diag_.contact_force;
  r.power = power();
  r.gantry_mm = 1e3 * state_.gantry_pos;
  r.drill_depth_mm = 1e3 * state_.drill_depth;
  r.tool_on = tool_on_;
  SensingModel clean = params_.sensing;
  clean.pointing_noise_sigma = 0.0;
  const PixelObservation px = observe_laser_cross(tool_uv() - config_.view_center, clean);
  r.laser_pixel = px.pixel;
  r.laser_visible = px.visible;
  r.wall_distance = wall_clearance();
  r.detach_phase = detach_.started() ? to_string(detach_.phase()) : "";
  r.last_rejection = last_rejection_;
  return r;
}

}  // namespace perch

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

#include "perchsim/detachment.hpp"

#include <algorithm>
#include <cmath>

namespace perch {

namespace {

constexpr double kRetractedSlide = 5e-4;
constexpr double kRestRate = 1e-3;
constexpr double kSettleTime = 0.2;
constexpr double kBottomTheta = deg2rad(0.5);

}  // namespace

const char* to_string(DetachPhase phase) {
  switch (phase) {
    case DetachPhase::Retract: return "retract";
    case DetachPhase::ReleasePins: return "release_pins";
    case DetachPhase::RotateBack: return "rotate_back";
    case DetachPhase::LockHinge: return "lock_hinge";
    case DetachPhase::GantryToFlight: return "gantry_to_flight";
    case DetachPhase::RampToHover: return "ramp_to_hover";
    case DetachPhase::LeanAway: return "lean_away";
    case DetachPhase::PumpsOff: return "pumps_off";
    case DetachPhase::ValvesOpen: return "valves_open";
    case DetachPhase::Separation: return "separation";
    case DetachPhase::Complete: return "complete";
    case DetachPhase::Aborted: return "aborted";
  }
  return "?";
}

DetachmentSequence::DetachmentSequence(ProcedureParams procedure, RotorModel rotors,
                                       double hover_rpm, Vec2 flight_gantry, double heading)
    : procedure_(procedure),
      rotors_(rotors),
      hover_rpm_(hover_rpm),
      flight_gantry_(flight_gantry),
      heading_(heading) {}

void DetachmentSequence::start(const DetachInput& in) {
  if (in.tool_on) throw ContractViolation("detachment needs the tool powered off");
  started_ = true;
  lock_pending_ = pumps_off_ = valves_open_ = separated_ = false;
  abort_reason_.clear();
  events_.clear();
  enter(DetachPhase::Retract, in.time, "start");
}

void DetachmentSequence::enter(DetachPhase next, double time, const std::string& event) {
  phase_ = next;
  phase_start_ = time;
  settle_since_ = -1.0;
  events_.push_back({time, event});
}

void DetachmentSequence::abort(double time, const std::string& reason) {
  abort_reason_ = std::string(to_string(phase_)) + ": " + reason;
  phase_ = DetachPhase::Aborted;
  events_.push_back({time, "abort " + abort_reason_});
}

bool DetachmentSequence::hover_thrust_reached() const {
  return started_ && phase_ >= DetachPhase::LeanAway && phase_ != DetachPhase::Aborted;
}

void DetachmentSequence::lock_result(const LockResult& result, double time) {
  if (!lock_pending_) return;
  lock_pending_ = false;
  if (!result.granted) {
    abort(time, "hinge lock refused: " + result.reason);
    return;
  }
  if (phase_ == DetachPhase::ReleasePins) {
    enter(DetachPhase::RotateBack, time, "pins_released");
  } else if (phase_ == DetachPhase::LockHinge) {
    enter(DetachPhase::GantryToFlight, time, "hinge_locked");
  }
}

std::optional<std::string> DetachmentSequence::operator_pumps_off(double time) {
  if (!hover_thrust_reached()) return "pumps off refused before hover thrust";
  if (!pumps_off_) {
    pumps_off_ = true;
    pumps_off_time_ = time;
    events_.push_back({time, "pumps_off"});
    if (phase_ < DetachPhase::ValvesOpen) phase_ = DetachPhase::ValvesOpen;
  }
  return std::nullopt;
}

std::optional<std::string> DetachmentSequence::operator_valves_open(double time) {
  if (!hover_thrust_reached()) return "valves refused before hover thrust";
  if (!pumps_off_) return "valves refused while pumps run";
  if (!valves_open_) {
    valves_open_ = true;
    events_.push_back({time, "valves_open"});
    if (phase_ < DetachPhase::Separation) {
      phase_ = DetachPhase::Separation;
      phase_start_ = time;
    }
  }
  return std::nullopt;
}

DetachOutput DetachmentSequence::advance(const DetachInput& in) {
  DetachOutput out;
  if (!started_ || phase_ == DetachPhase::Aborted) {
    out.rpm = Vec4::Zero();
    return out;
  }
  const double elapsed = in.time - phase_start_;
  const bool timed_out = elapsed > kPhaseTimeout;
  const FlightReference lean{Vec3(-procedure_.lean_away_speed, 0.0, 0.0), heading_};

  switch (phase_) {
    case DetachPhase::Retract: {
      const double w = procedure_.retract_throttle * rotors_.speed_limit;
      const bool home = in.slide <= kRetractedSlide && std::abs(in.slide_rate) <= kRestRate;
      if (home) {
        if (settle_since_ < 0.0) settle_since_ = in.time;
        out.rpm = Vec4::Zero();
        const bool quiet = in.rotor_speeds.cwiseAbs().maxCoeff() <= procedure_.ramped_down_rpm;
        if (quiet && in.time - settle_since_ >= kSettleTime) {
          enter(DetachPhase::ReleasePins, in.time, "retracted");
        }
      } else {
        out.rpm = Vec4::Constant(-w);
        if (timed_out) abort(in.time, "slide did not retract");
      }
      break;
    }
    case DetachPhase::ReleasePins:
      out.rpm = Vec4::Zero();
      if (!lock_pending_) {
        out.lock_request = HingeLockState::Released;
        lock_pending_ = true;
      }
      break;
    case DetachPhase::RotateBack: {
      const bool down = in.theta <= kBottomTheta && std::abs(in.theta_rate) <= kRestRate;
      if (down) {
        out.rpm = Vec4::Zero();
        if (settle_since_ < 0.0) settle_since_ = in.time;
        const bool quiet = in.rotor_speeds.cwiseAbs().maxCoeff() <= procedure_.ramped_down_rpm;
        if (quiet && in.time - settle_since_ >= kSettleTime) {
          enter(DetachPhase::LockHinge, in.time, "rotated_back");
        }
      } else {
        out.rpm = rotate_back_command(procedure_.rotate_back_throttle, rotors_);
        if (timed_out) abort(in.time, "table did not rotate back");
      }
      break;
    }
    case DetachPhase::LockHinge:
      out.rpm = Vec4::Zero();
      if (!lock_pending_) {
        out.lock_request = HingeLockState::Locked;
        lock_pending_ = true;
      }
      break;
    case DetachPhase::GantryToFlight:
      out.rpm = Vec4::Zero();
      out.gantry_target = flight_gantry_;
      if (in.gantry_arrived && elapsed > 0.0) {
        enter(DetachPhase::RampToHover, in.time, "gantry_parked");
        out.reset_estimator = true;
      } else if (timed_out) {
        abort(in.time, "gantry did not reach flight position");
      }
      break;
    case DetachPhase::RampToHover: {
      const double frac = std::clamp(elapsed / procedure_.hover_ramp_time, 0.0, 1.0);
      out.rpm = Vec4::Constant(frac * hover_rpm_);
      if (frac >= 1.0) {
        enter(DetachPhase::LeanAway, in.time, "hover_thrust");
        out.reset_estimator = true;
      }
      break;
    }
    case DetachPhase::LeanAway:
      out.flight_ref = lean;
      if (elapsed >= procedure_.pumps_off_delay) {
        pumps_off_ = true;
        pumps_off_time_ = in.time;
        out.pumps_on = false;
        enter(DetachPhase::ValvesOpen, in.time, "pumps_off");
      }
      break;
    case DetachPhase::PumpsOff:
    case DetachPhase::ValvesOpen:
      out.flight_ref = lean;
      if (in.time - pumps_off_time_ >= procedure_.valves_open_delay) {
        valves_open_ = true;
        out.valves_open = true;
        enter(DetachPhase::Separation, in.time, "valves_open");
      }
      break;
    case DetachPhase::Separation:
      out.flight_ref = lean;
      if (!in.any_attached && !separated_) {
        separated_ = true;
        events_.push_back({in.time, "separated"});
      }
      if (separated_ && in.wall_clearance >= procedure_.detach_clearance) {
        enter(DetachPhase::Complete, in.time, "clear_of_wall");
      } else if (timed_out) {
        abort(in.time, "cups did not release");
      }
      break;
    case DetachPhase::Complete:
      out.flight_ref = FlightReference{Vec3::Zero(), heading_};
      break;
    case DetachPhase::Aborted:
      out.rpm = Vec4::Zero();
      break;
  }
  return out;
}

}  // namespace perch

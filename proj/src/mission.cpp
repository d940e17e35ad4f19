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

#include "perchsim/mission.hpp"

#include <cmath>

#include "perchsim/tool.hpp"

namespace perch {

LockSet enforce_locks(Mode mode) {
  switch (mode) {
    case Mode::Flight: return {true, true, true};
    case Mode::Perching: return {true, true, true};
    case Mode::Rotation: return {false, false, true};
    case Mode::Manipulation: return {true, false, false};
    case Mode::Detachment: return {false, false, false};
  }
  throw ContractViolation("unknown mode");
}

bool hinge_respects(const LockSet& locks, HingeLockState hinge) {
  const HingeFreedoms f = freedoms_of(hinge);
  return !(locks.theta_locked && f.theta_free) && !(locks.slide_locked && f.slide_free);
}

namespace {

HandleResult reject(Mode mode, std::string reason) {
  HandleResult r;
  r.mode = mode;
  r.rejection = std::move(reason);
  return r;
}

HandleResult accept(Mode mode, std::vector<Action> actions = {}) {
  HandleResult r;
  r.mode = mode;
  r.actions = std::move(actions);
  return r;
}

std::string in_mode(const char* what, Mode mode) {
  return std::string(what) + " not allowed in " + to_string(mode) + " mode";
}

HandleResult set_mode(Mode mode, Mode target, const MissionView& v, const ParameterSet& p) {
  if (target == mode) return accept(mode);
  const auto illegal = [&] {
    return reject(mode, std::string("illegal transition ") + to_string(mode) + " -> " +
                            to_string(target));
  };
  switch (mode) {
    case Mode::Flight:
      if (target != Mode::Perching) return illegal();
      if (!v.pumps_on) return reject(mode, "perching needs the pumps on");
      if (!v.contact) return reject(mode, "perching needs both cups in contact");
      return accept(target);
    case Mode::Perching:
      if (target != Mode::Rotation) return illegal();
      if (!v.attached) return reject(mode, "rotation needs both cups attached");
      if (!v.ramped_down) return reject(mode, "rotation needs the rotors ramped down");
      if (!v.gantry_centered) return reject(mode, "rotation needs the gantry at workspace center");
      if (v.hinge != HingeLockState::Locked) return reject(mode, "hinge must be locked");
      return accept(target, {act::Rotation{0.0}, act::Lock{HingeLockState::Released}});
    case Mode::Rotation: {
      if (target != Mode::Manipulation) return illegal();
      const LockResult lr = set_hinge_lock(v.hinge, HingeLockState::RotationLocked, v.theta,
                                           v.slide, p.robot);
      if (!lr.granted) return reject(mode, "rotation lock refused: " + lr.reason);
      return accept(target, {act::Rotation{0.0}, act::Lock{HingeLockState::RotationLocked}});
    }
    case Mode::Manipulation:
      if (target != Mode::Detachment) return illegal();
      if (v.tool_on) return reject(mode, "detachment needs the tool off");
      return accept(target, {act::Feed{0.0, FeedDirection::Advance},
                             act::StartDetachment{!v.depth_goal_reached}});
    case Mode::Detachment:
      if (target != Mode::Flight) return illegal();
      if (!v.detach_complete) return reject(mode, "detachment sequence not complete");
      return accept(target, {act::FlightRef{FlightReference{}}});
  }
  return illegal();
}

}  // namespace

HandleResult handle(Mode mode, const OperatorCommand& command, const MissionView& v,
                    const ParameterSet& p) {
  const LockSet locks = enforce_locks(mode);
  if (const auto* c = std::get_if<SetFlightRef>(&command)) {
    if (mode != Mode::Flight && mode != Mode::Perching) return reject(mode, in_mode("flight_ref", mode));
    if (v.ramp_down_started) return reject(mode, "flight control is off after ramp-down");
    if (!c->velocity.allFinite() || !std::isfinite(c->heading)) return reject(mode, "non-finite reference");
    if (c->velocity.norm() > p.gains.max_velocity + 1e-12) return reject(mode, "velocity exceeds limit");
    return accept(mode, {act::FlightRef{FlightReference{c->velocity, c->heading}}});
  }
  if (const auto* c = std::get_if<SetMode>(&command)) return set_mode(mode, c->mode, v, p);
  if (const auto* c = std::get_if<Pumps>(&command)) {
    if (c->on) return accept(mode, {act::PumpsOn{true}});
    switch (mode) {
      case Mode::Flight:
        return accept(mode, {act::PumpsOn{false}});
      case Mode::Perching:
        if (v.ramp_down_started) return reject(mode, "pumps off while hanging on the cups");
        return accept(mode, {act::PumpsOn{false}});
      case Mode::Detachment:
        if (!v.detach_hover_reached) return reject(mode, "pumps off refused before hover thrust");
        return accept(mode, {act::DetachPumpsOff{}});
      default:
        return reject(mode, in_mode("pumps off", mode));
    }
  }
  if (const auto* c = std::get_if<Valves>(&command)) {
    if (!c->open) return accept(mode, {act::ValvesOpen{false}});
    switch (mode) {
      case Mode::Flight:
        return accept(mode, {act::ValvesOpen{true}});
      case Mode::Perching:
        if (v.ramp_down_started) return reject(mode, "valves open while hanging on the cups");
        return accept(mode, {act::ValvesOpen{true}});
      case Mode::Detachment:
        if (!v.detach_hover_reached) return reject(mode, "valves refused before hover thrust");
        if (v.pumps_on) return reject(mode, "valves refused while pumps run");
        return accept(mode, {act::DetachValvesOpen{}});
      default:
        return reject(mode, in_mode("valves open", mode));
    }
  }
  if (const auto* c = std::get_if<RotationThrottle>(&command)) {
    if (mode != Mode::Rotation) return reject(mode, in_mode("rotation_throttle", mode));
    if (v.hinge != HingeLockState::Released) return reject(mode, "hinge not released");
    if (!(c->value >= 0.0 && c->value <= 1.0)) return reject(mode, "throttle outside [0, 1]");
    return accept(mode, {act::Rotation{c->value}});
  }
  if (const auto* c = std::get_if<FeedThrottle>(&command)) {
    if (mode != Mode::Manipulation) return reject(mode, in_mode("feed_throttle", mode));
    if (v.hinge != HingeLockState::RotationLocked) return reject(mode, "hinge not rotation-locked");
    if (!(c->value >= 0.0 && c->value <= 1.0)) return reject(mode, "throttle outside [0, 1]");
    return accept(mode, {act::Feed{c->value, c->direction}});
  }
  if (const auto* c = std::get_if<GantryTarget>(&command)) {
    if (locks.gantry_locked || mode == Mode::Detachment) {
      return reject(mode, in_mode("gantry", mode));
    }
    if (!c->xy.allFinite() || !in_workspace(c->xy, p.robot, 1e-9)) {
      return reject(mode, "target outside gantry workspace");
    }
    return accept(mode, {act::Gantry{c->xy}});
  }
  if (const auto* c = std::get_if<ToolPower>(&command)) {
    if (!c->on) return accept(mode, {act::Tool{false}});
    if (mode != Mode::Manipulation) return reject(mode, in_mode("tool on", mode));
    if (v.hinge != HingeLockState::RotationLocked) return reject(mode, "hinge not rotation-locked");
    return accept(mode, {act::Tool{true}});
  }
  if (std::holds_alternative<RampDownRotors>(command)) {
    if (mode != Mode::Perching) return reject(mode, in_mode("ramp_down", mode));
    if (!v.attached) return reject(mode, "ramp_down needs both cups attached");
    if (!v.pumps_on) return reject(mode, "ramp_down needs the pumps on");
    if (v.ramp_down_started) return accept(mode);
    return accept(mode, {act::RampDown{}});
  }
  return reject(mode, "unknown command");
}

bool is_mode_trace_prefix(const std::vector<Mode>& trace) {
  static constexpr Mode cycle[] = {Mode::Flight, Mode::Perching, Mode::Rotation,
                                   Mode::Manipulation, Mode::Detachment};
  if (trace.empty() || trace.front() != Mode::Flight) return false;
  for (std::size_t i = 1; i < trace.size(); ++i) {
    if (trace[i] != cycle[i % 5]) return false;
  }
  return true;
}

bool is_valid_mode_trace(const std::vector<Mode>& trace) {
  return is_mode_trace_prefix(trace) && trace.size() % 5 == 1;
}

}  // namespace perch

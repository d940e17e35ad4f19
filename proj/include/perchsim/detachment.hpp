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

#include <optional>
#include <string>
#include <vector>

#include "perchsim/attachment.hpp"
#include "perchsim/control.hpp"

namespace perch {

enum class DetachPhase {
  Retract,
  ReleasePins,
  RotateBack,
  LockHinge,
  GantryToFlight,
  RampToHover,
  LeanAway,
  PumpsOff,
  ValvesOpen,
  Separation,
  Complete,
  Aborted,
};

const char* to_string(DetachPhase phase);

struct DetachEvent {
  double time = 0.0;
  std::string name;
};

/// What the sequencer sees each tick.
struct DetachInput {
  double time = 0.0;
  double theta = 0.0;
  double slide = 0.0;
  double slide_rate = 0.0;
  double theta_rate = 0.0;
  Vec4 rotor_speeds = Vec4::Zero();
  HingeLockState lock = HingeLockState::RotationLocked;
  bool gantry_arrived = false;
  bool any_attached = true;
  double wall_clearance = 0.0;  // cup face to wall, m
  bool tool_on = false;
};

/// What it asks for. Exactly one of rpm / flight_ref drives the rotors.
struct DetachOutput {
  std::optional<Vec4> rpm;
  std::optional<FlightReference> flight_ref;
  std::optional<HingeLockState> lock_request;
  std::optional<Vec2> gantry_target;
  std::optional<bool> pumps_on;
  std::optional<bool> valves_open;
  bool reset_estimator = false;
};

class DetachmentSequence {
 public:
  DetachmentSequence(ProcedureParams procedure, RotorModel rotors, double hover_rpm,
                     Vec2 flight_gantry, double heading);

  /// Throws ContractViolation if the tool is still powered.
  void start(const DetachInput& in);

  DetachOutput advance(const DetachInput& in);

  /// Feedback from the hinge after a lock request was issued.
  void lock_result(const LockResult& result, double time);

  /// Operator overrides of the scheduled pump and valve steps.
  std::optional<std::string> operator_pumps_off(double time);
  std::optional<std::string> operator_valves_open(double time);

  DetachPhase phase() const { return phase_; }
  bool started() const { return started_; }
  bool complete() const { return phase_ == DetachPhase::Complete; }
  bool aborted() const { return phase_ == DetachPhase::Aborted; }
  bool hover_thrust_reached() const;
  const std::string& abort_reason() const { return abort_reason_; }
  const std::vector<DetachEvent>& events() const { return events_; }

  /// Longest any phase may take before the sequence aborts.
  static constexpr double kPhaseTimeout = 20.0;

 private:
  void enter(DetachPhase next, double time, const std::string& event);
  void abort(double time, const std::string& reason);

  ProcedureParams procedure_;
  RotorModel rotors_;
  double hover_rpm_;
  Vec2 flight_gantry_;
  double heading_;
  DetachPhase phase_ = DetachPhase::Retract;
  bool started_ = false;
  double phase_start_ = 0.0;
  double settle_since_ = -1.0;
  bool lock_pending_ = false;
  bool pumps_off_ = false;
  bool valves_open_ = false;
  bool separated_ = false;
  double pumps_off_time_ = 0.0;
  std::string abort_reason_;
  std::vector<DetachEvent> events_;
};

}  // namespace perch

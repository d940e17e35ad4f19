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
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "perchsim/detachment.hpp"
#include "perchsim/mission.hpp"
#include "perchsim/telemetry.hpp"
#include "perchsim/tool.hpp"

namespace perch {

struct SimConfig {
  double dt = 0.002;
  int telemetry_every = 10;       // ticks; 20 ms at the default step
  Vec3 start_position{1.5, 0.0, 1.5};
  double start_heading = kPi;     // facing a wall with normal +x
  Vec2 view_center = Vec2::Zero();  // wall uv of the target marker
  Vec4 thrust_gains = Vec4::Ones();  // applied while perched
};

struct MissionEvent {
  double time = 0.0;
  std::string text;
};

struct CommandOutcome {
  bool accepted = true;
  std::string reason;
};

/// One robot, one wall, one operator. Commands are applied between ticks.
class Simulation {
 public:
  Simulation(ParameterSet params, SimConfig config, std::uint64_t seed);

  CommandOutcome submit(const OperatorCommand& command);
  void tick();
  void run_for(double seconds);

  using TelemetrySink = std::function<void(const TelemetryRecord&)>;
  void set_telemetry_sink(TelemetrySink sink) { sink_ = std::move(sink); }

  const SimState& state() const { return state_; }
  Mode mode() const { return mode_; }
  HingeLockState hinge() const { return hinge_; }
  const CupPair& cups() const { return cups_; }
  const GantryState& gantry() const { return gantry_; }
  const DetachmentSequence& detachment() const { return detach_; }
  const ParameterSet& params() const { return params_; }
  const SimConfig& config() const { return config_; }
  const DynamicsModel& model() const { return model_; }
  const StepDiagnostics& diagnostics() const { return diag_; }
  const std::vector<MissionEvent>& events() const { return events_; }
  const std::vector<Mode>& mode_trace() const { return trace_; }
  long long ticks() const { return ticks_; }

  bool tool_on() const { return tool_on_; }
  bool pumps_on() const { return cups_[0].pump_on; }
  bool valves_open() const { return cups_[0].valve_open; }
  bool failed() const { return !failure_.empty(); }
  const std::string& failure() const { return failure_; }
  const std::string& last_rejection() const { return last_rejection_; }
  bool depth_goal_reached() const;
  double power() const;
  double slip_distance() const;

  MissionView view() const;
  TelemetryRecord telemetry() const;

  /// Tooltip and attachment origin in wall coordinates.
  Vec2 tool_uv() const;
  Vec2 attachment_uv() const;
  const WallFrame& wall() const { return wall_; }
  /// Cup-face clearance from the wall (m).
  double wall_clearance() const;
  PixelObservation camera();

 private:
  void apply(const Action& action);
  Vec4 rotor_commands(const Odometry& odom);
  void update_attachment();
  void log(std::string text);
  void fail(std::string reason);

  ParameterSet params_;
  SimConfig config_;
  DynamicsModel model_;
  WallFrame wall_;
  FlightController flight_;
  OdometrySource odometry_;
  DetachmentSequence detach_;
  std::mt19937_64 rng_;

  SimState state_;
  Mode mode_ = Mode::Flight;
  HingeLockState hinge_ = HingeLockState::Locked;
  CupPair cups_{};
  GantryState gantry_;
  StepDiagnostics diag_;
  FlightReference flight_ref_;
  double rotation_throttle_ = 0.0;
  double feed_throttle_ = 0.0;
  FeedDirection feed_direction_ = FeedDirection::Advance;
  bool tool_on_ = false;
  bool ramp_down_started_ = false;
  double ramp_start_ = 0.0;
  Vec4 ramp_from_ = Vec4::Zero();

  long long ticks_ = 0;
  std::vector<MissionEvent> events_;
  std::vector<Mode> trace_;
  std::size_t detach_events_seen_ = 0;
  std::string failure_;
  std::string last_rejection_;
  TelemetrySink sink_;
};

/// Pose of a robot hovering level at `position` facing `heading`.
SimState hover_state(const ParameterSet& params, const Vec3& position, double heading);

}  // namespace perch

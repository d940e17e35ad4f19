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

#include "perchsim/agent.hpp"

#include <cmath>

namespace perch {

const char* to_string(AgentOutcome outcome) {
  switch (outcome) {
    case AgentOutcome::Drilled: return "drilled";
    case AgentOutcome::Unreachable: return "unreachable";
    case AgentOutcome::Failed: return "failed";
    case AgentOutcome::Timeout: return "timeout";
    case AgentOutcome::Rejected: return "rejected";
  }
  return "?";
}

Vec2 motor_tool_uv(const Simulation& sim) {
  SimState s = sim.state();
  s.gantry_pos = sim.gantry().motor;
  return sim.wall().project(frame_in_world(s, Frame::Tool, sim.params().robot).translation());
}

namespace {

struct Runner {
  Simulation& sim;
  const AgentConfig& cfg;
  HoleRun& run;

  template <class Pred>
  bool wait(Pred pred) {
    const double deadline = sim.state().time + cfg.phase_timeout;
    while (!pred()) {
      if (sim.failed()) {
        run.outcome = AgentOutcome::Failed;
        run.detail = sim.failure();
        return false;
      }
      if (sim.state().time > deadline) {
        run.outcome = AgentOutcome::Timeout;
        run.detail = "timed out in " + std::string(to_string(sim.mode()));
        return false;
      }
      sim.tick();
    }
    return !sim.failed();
  }

  bool send(const OperatorCommand& c) {
    const CommandOutcome out = sim.submit(c);
    if (!out.accepted) {
      run.outcome = AgentOutcome::Rejected;
      run.detail = format_command(c) + ": " + out.reason;
    }
    return out.accepted;
  }

  bool settle() {
    const double until = sim.state().time + cfg.settle_time;
    return wait([&] { return sim.state().time >= until; });
  }

  bool detach() {
    if (!send(SetMode{Mode::Detachment})) return false;
    if (!wait([&] { return sim.detachment().complete() || sim.detachment().aborted(); })) return false;
    if (sim.detachment().aborted()) {
      run.outcome = AgentOutcome::Failed;
      run.detail = sim.detachment().abort_reason();
      return false;
    }
    return send(SetMode{Mode::Flight});
  }
};

}  // namespace

HoleRun run_hole_mission(Simulation& sim, const AgentConfig& cfg) {
  HoleRun run;
  run.target = sim.config().view_center;
  Runner r{sim, cfg, run};
  const double heading = sim.config().start_heading;

  if (!r.send(Pumps{true})) return run;
  if (!r.send(SetFlightRef{Vec3(cfg.approach_speed, 0.0, 0.0), heading})) return run;
  if (!r.wait([&] { return sim.view().contact; })) return run;
  if (!r.send(SetMode{Mode::Perching})) return run;
  if (!r.wait([&] { return sim.view().attached; })) return run;
  run.perch_uv = sim.attachment_uv();
  if (!r.send(RampDownRotors{})) return run;
  if (!r.wait([&] {
        const MissionView v = sim.view();
        return v.ramped_down && v.gantry_centered;
      })) {
    return run;
  }
  if (!r.send(SetMode{Mode::Rotation})) return run;
  if (!r.send(RotationThrottle{cfg.rotation_throttle})) return run;
  const double tol = sim.params().robot.engage_tolerance_theta;
  if (!r.wait([&] {
        const SimState& s = sim.state();
        return std::abs(s.hinge_theta - 0.5 * kPi) <= tol && std::abs(s.hinge_theta_rate) < 1e-3;
      })) {
    return run;
  }
  if (!r.send(SetMode{Mode::Manipulation})) return run;

  // Visual servoing: drive the laser cross onto the image centre.
  bool aligned = false;
  for (int i = 0; i <= cfg.max_align_moves; ++i) {
    const PixelObservation obs = sim.camera();
    if (!obs.visible) break;
    const Vec2 cross = obs.pixel * sim.params().sensing.pixel_pitch;
    if (cross.isZero(1e-12)) {
      aligned = true;
      break;
    }
    if (i == cfg.max_align_moves) {
      aligned = true;
      break;
    }
    const Vec2 goal = sim.gantry().target + Vec2(cross.y(), cross.x());
    if (!in_workspace(goal, sim.params().robot, 1e-9)) break;
    if (!r.send(GantryTarget{goal})) return run;
    ++run.align_moves;
    if (!r.wait([&] { return sim.gantry().arrived(); })) return run;
    if (!r.settle()) return run;
  }
  if (!aligned) {
    run.outcome = AgentOutcome::Unreachable;
    run.detail = "target outside the gantry workspace";
    if (cfg.detach && !r.detach()) return run;
    run.outcome = AgentOutcome::Unreachable;
    run.finish_time = sim.state().time;
    return run;
  }

  run.motor_uv = motor_tool_uv(sim);
  run.aligned_uv = sim.tool_uv();
  if (!r.send(ToolPower{true})) return run;
  if (!r.send(FeedThrottle{cfg.feed_throttle, FeedDirection::Advance})) return run;
  if (!r.wait([&] { return sim.depth_goal_reached(); })) return run;
  run.final_uv = sim.tool_uv();
  run.slip = sim.slip_distance();
  if (!r.send(ToolPower{false})) return run;
  run.outcome = AgentOutcome::Drilled;
  if (cfg.detach && !r.detach()) return run;
  run.outcome = AgentOutcome::Drilled;
  run.finish_time = sim.state().time;
  return run;
}

}  // namespace perch

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

#include <doctest.h>

#include <random>

#include "perchsim/detachment.hpp"
#include "perchsim/mission.hpp"

using namespace perch;

namespace {

MissionView perched_view() {
  MissionView v;
  v.pumps_on = true;
  v.contact = v.attached = v.any_attached = true;
  v.ramp_down_started = v.ramped_down = v.gantry_centered = true;
  return v;
}

bool has_tool_on(const HandleResult& r) {
  for (const auto& a : r.actions) {
    if (const auto* t = std::get_if<act::Tool>(&a); t != nullptr && t->on) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("lock rows per mode") {
  // theta, slide, gantry
  const bool rows[5][3] = {{true, true, true},
                           {true, true, true},
                           {false, false, true},
                           {true, false, false},
                           {false, false, false}};
  for (int m = 0; m < 5; ++m) {
    const LockSet l = enforce_locks(static_cast<Mode>(m));
    CHECK(l.theta_locked == rows[m][0]);
    CHECK(l.slide_locked == rows[m][1]);
    CHECK(l.gantry_locked == rows[m][2]);
  }
}

TEST_CASE("hinge states that honour each lock row") {
  using H = HingeLockState;
  CHECK(hinge_respects(enforce_locks(Mode::Flight), H::Locked));
  CHECK_FALSE(hinge_respects(enforce_locks(Mode::Flight), H::Released));
  CHECK(hinge_respects(enforce_locks(Mode::Rotation), H::Released));
  CHECK(hinge_respects(enforce_locks(Mode::Manipulation), H::RotationLocked));
  CHECK_FALSE(hinge_respects(enforce_locks(Mode::Manipulation), H::Released));
}

TEST_CASE("guards refuse out-of-procedure commands") {
  const ParameterSet p = ParameterSet::defaults();
  const MissionView idle;
  CHECK_FALSE(handle(Mode::Flight, ToolPower{true}, idle, p).accepted());
  CHECK_FALSE(handle(Mode::Flight, SetMode{Mode::Perching}, idle, p).accepted());
  CHECK_FALSE(handle(Mode::Flight, SetMode{Mode::Manipulation}, idle, p).accepted());
  CHECK_FALSE(handle(Mode::Flight, RampDownRotors{}, idle, p).accepted());

  MissionView v = perched_view();
  v.ramped_down = false;
  const HandleResult spinning = handle(Mode::Perching, SetMode{Mode::Rotation}, v, p);
  CHECK_FALSE(spinning.accepted());
  CHECK(spinning.rejection->find("ramped down") != std::string::npos);
  CHECK(spinning.mode == Mode::Perching);
  CHECK(spinning.actions.empty());

  v = perched_view();
  v.gantry_centered = false;
  CHECK_FALSE(handle(Mode::Perching, SetMode{Mode::Rotation}, v, p).accepted());
  CHECK(handle(Mode::Perching, SetMode{Mode::Rotation}, perched_view(), p).accepted());

  v = perched_view();
  v.hinge = HingeLockState::Released;
  v.theta = deg2rad(60.0);
  CHECK_FALSE(handle(Mode::Rotation, SetMode{Mode::Manipulation}, v, p).accepted());
  CHECK_FALSE(handle(Mode::Rotation, ToolPower{true}, v, p).accepted());
  CHECK_FALSE(handle(Mode::Rotation, SetMode{Mode::Detachment}, v, p).accepted());
  v.theta = 0.5 * kPi;
  const HandleResult m = handle(Mode::Rotation, SetMode{Mode::Manipulation}, v, p);
  CHECK(m.accepted());
  CHECK(m.mode == Mode::Manipulation);

  v.hinge = HingeLockState::RotationLocked;
  v.tool_on = true;
  CHECK_FALSE(handle(Mode::Manipulation, SetMode{Mode::Detachment}, v, p).accepted());
  CHECK(has_tool_on(handle(Mode::Manipulation, ToolPower{true}, v, p)));
  CHECK_FALSE(handle(Mode::Manipulation, GantryTarget{Vec2(1.0, 0.0)}, v, p).accepted());
  CHECK(handle(Mode::Manipulation, GantryTarget{Vec2(0.01, 0.01)}, v, p).accepted());

  v.tool_on = false;
  CHECK_FALSE(handle(Mode::Detachment, SetMode{Mode::Flight}, v, p).accepted());
  CHECK_FALSE(handle(Mode::Detachment, Valves{true}, v, p).accepted());
  v.detach_complete = true;
  CHECK(handle(Mode::Detachment, SetMode{Mode::Flight}, v, p).accepted());
}

TEST_CASE("velocity references above the limit are refused") {
  const ParameterSet p = ParameterSet::defaults();
  const double vmax = p.gains.max_velocity;
  CHECK(handle(Mode::Flight, SetFlightRef{Vec3(vmax, 0, 0), 0.0}, {}, p).accepted());
  CHECK_FALSE(handle(Mode::Flight, SetFlightRef{Vec3(vmax + 0.1, 0, 0), 0.0}, {}, p).accepted());
}

TEST_CASE("no command sequence turns the drill on outside a rotation-locked manipulation") {
  const ParameterSet p = ParameterSet::defaults();
  std::mt19937_64 rng(17);
  std::bernoulli_distribution coin(0.5);
  std::uniform_int_distribution<int> mode_d(0, 4), hinge_d(0, 2);
  for (int i = 0; i < 100000; ++i) {
    MissionView v;
    v.pumps_on = coin(rng);
    v.contact = coin(rng);
    v.attached = coin(rng);
    v.ramped_down = coin(rng);
    v.gantry_centered = coin(rng);
    v.tool_on = coin(rng);
    v.hinge = static_cast<HingeLockState>(hinge_d(rng));
    const Mode m = static_cast<Mode>(mode_d(rng));
    const HandleResult r = handle(m, ToolPower{true}, v, p);
    if (has_tool_on(r)) {
      CHECK(r.mode == Mode::Manipulation);
      CHECK(v.hinge == HingeLockState::RotationLocked);
    }
  }
}

TEST_CASE("mode traces follow the mission cycle") {
  using M = Mode;
  CHECK(is_valid_mode_trace({M::Flight}));
  CHECK(is_valid_mode_trace({M::Flight, M::Perching, M::Rotation, M::Manipulation, M::Detachment,
                             M::Flight}));
  CHECK_FALSE(is_valid_mode_trace({M::Flight, M::Perching}));
  CHECK(is_mode_trace_prefix({M::Flight, M::Perching}));
  CHECK_FALSE(is_mode_trace_prefix({M::Flight, M::Rotation}));
  CHECK_FALSE(is_mode_trace_prefix({M::Perching}));
  CHECK_FALSE(is_mode_trace_prefix({}));
}

TEST_CASE("detachment refuses to start with the tool running") {
  const ParameterSet p = ParameterSet::defaults();
  const RotorModel rotors = RotorModel::from_params(p.robot);
  DetachmentSequence seq(p.procedure, rotors, 3000.0, p.robot.gantry_flight_position(), kPi);
  DetachInput in;
  in.tool_on = true;
  CHECK_THROWS_AS(seq.start(in), ContractViolation);
  in.tool_on = false;
  seq.start(in);
  CHECK(seq.started());
  CHECK(seq.operator_pumps_off(0.1).has_value());
  CHECK(seq.operator_valves_open(0.1).has_value());
}

TEST_CASE("mode names round trip") {
  for (int m = 0; m < 5; ++m) {
    const Mode mode = static_cast<Mode>(m);
    CHECK(mode_from_string(to_string(mode)) == mode);
  }
  CHECK_FALSE(mode_from_string("hover").has_value());
}

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

#include "perchsim/simulation.hpp"

using namespace perch;

TEST_CASE("rotation control reverses the front pair only") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Vec4 w = rotation_control(0.5, Regime::Perched, HingeLockState::Released, m);
  CHECK(w[kFrontLeft] == doctest::Approx(-0.5 * m.speed_limit));
  CHECK(w[kFrontRight] == w[kFrontLeft]);
  CHECK(w[kBackLeft] == 0.0);
  CHECK(w[kBackRight] == 0.0);
  CHECK(rotation_control(0.0, Regime::Perched, HingeLockState::Released, m).isZero());
  CHECK_THROWS_AS(rotation_control(0.5, Regime::FreeFlight, HingeLockState::Released, m),
                  ContractViolation);
  CHECK_THROWS_AS(rotation_control(0.5, Regime::Perched, HingeLockState::Locked, m),
                  ContractViolation);
}

TEST_CASE("feed control is symmetric and signed by direction") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Vec4 adv = feed_control(0.8, FeedDirection::Advance, Regime::Perched,
                                HingeLockState::RotationLocked, m);
  CHECK((adv - Vec4::Constant(0.8 * m.speed_limit)).norm() < 1e-9);
  const Vec4 ret = feed_control(0.8, FeedDirection::Retract, Regime::Perched,
                                HingeLockState::RotationLocked, m);
  CHECK((ret + adv).norm() < 1e-9);
  CHECK_THROWS_AS(feed_control(0.8, FeedDirection::Advance, Regime::Perched,
                               HingeLockState::Released, m),
                  ContractViolation);
}

TEST_CASE("rotate-back command is a pure pitch couple") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Vec4 w = rotate_back_command(0.3, m);
  const Vec6 wr = rotor_wrench(w, m);
  CHECK(std::abs(wr[2]) < 1e-9);
  CHECK(std::abs(wr[3]) < 1e-9);
  CHECK(std::abs(wr[4]) > 1.0);
}

TEST_CASE("mixer inverts its allocation") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Mixer mix = make_mixer(m, Vec3(0.01, -0.02, 0.0));
  CHECK((mix.allocation * mix.mixing - Eigen::Matrix4d::Identity()).norm() < 1e-9);
}

TEST_CASE("rpm for thrusts maps negative thrust to reverse spin") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Vec4 f(10.0, -5.0, 0.0, 27.5);
  const Vec4 w = rpm_for_thrusts(f, m);
  for (int i = 0; i < 4; ++i) CHECK(m.thrust(w[i]) == doctest::Approx(f[i]).epsilon(1e-12));
}

TEST_CASE("flight controller holds hover and tracks a forward reference") {
  const ParameterSet ps = ParameterSet::defaults();
  SimConfig cfg;
  cfg.start_position = Vec3(3.0, 0.0, 1.5);
  Simulation sim(ps, cfg, 1);
  sim.run_for(1.0);
  CHECK((sim.state().body_pose.position - cfg.start_position).norm() < 0.02);
  REQUIRE(sim.submit(SetFlightRef{Vec3(0.4, 0.0, 0.0), kPi}).accepted);
  sim.run_for(3.0);
  // Forward is -x when facing a wall with normal +x.
  CHECK(sim.state().linear_velocity.x() == doctest::Approx(-0.4).epsilon(0.1));
  CHECK(std::abs(sim.state().linear_velocity.y()) < 0.05);
  CHECK(std::abs(sim.state().linear_velocity.z()) < 0.05);
}

TEST_CASE("noise-free odometry is ground truth") {
  const ParameterSet ps = ParameterSet::defaults();
  OdometryNoise quiet;
  quiet.enabled = false;
  OdometrySource odo(quiet, 3);
  const SimState s = hover_state(ps, Vec3(1, 2, 3), 0.5);
  const Odometry o = odo.measure(s, 0.002);
  CHECK(o.position == s.body_pose.position);
  CHECK(o.velocity == s.linear_velocity);
}

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

#include "perchsim/rotor.hpp"

using namespace perch;

TEST_CASE("default calibration reproduces the thrust and power anchors") {
  const ParameterSet ps = ParameterSet::defaults();
  const RotorModel m = calibrate_rotor_coeffs(default_anchors(ps.robot, ps.env), ps.robot);
  CHECK(m.k_f == doctest::Approx(110.0 / (4.0 * 3000.0 * 3000.0)).epsilon(1e-12));
  CHECK(4.0 * m.thrust(3000.0) == doctest::Approx(110.0).epsilon(1e-12));
  const double weight = total_mass(ps.robot, 0.0) * ps.env.gravity;
  const double w = std::sqrt(weight / (4.0 * m.k_f));
  CHECK(power_draw(Vec4::Constant(w), m) == doctest::Approx(2000.0).epsilon(1e-9));
}

TEST_CASE("shipped rotor coefficients match the calibration") {
  const ParameterSet ps = ParameterSet::defaults();
  const RotorModel fit = calibrate_rotor_coeffs(default_anchors(ps.robot, ps.env), ps.robot);
  const RotorModel m = RotorModel::from_params(ps.robot);
  CHECK(m.k_f == doctest::Approx(fit.k_f).epsilon(1e-9));
  CHECK(m.k_p == doctest::Approx(fit.k_p).epsilon(1e-9));
}

TEST_CASE("calibration needs anchors") {
  const RobotParams p;
  CHECK_THROWS_AS(calibrate_rotor_coeffs({}, p), ContractViolation);
}

TEST_CASE("rotor wrench equals the per-rotor sum") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-m.speed_limit, m.speed_limit);
  for (int trial = 0; trial < 500; ++trial) {
    const Vec4 w(u(rng), u(rng), u(rng), u(rng));
    double fz = 0.0, tx = 0.0, ty = 0.0, tz = 0.0;
    for (int i = 0; i < 4; ++i) {
      const double f = (w[i] < 0 ? -1.0 : 1.0) * m.k_f * w[i] * w[i];
      const Vec3& r = m.positions[i];
      fz += f;
      tx += r.y() * f;   // (r x f).x with f along z
      ty += -r.x() * f;  // (r x f).y
      tz += -m.spin_directions[i] * (w[i] < 0 ? -1.0 : 1.0) * m.k_tau * w[i] * w[i];
    }
    const Vec6 got = rotor_wrench(w, m);
    CHECK(got[0] == 0.0);
    CHECK(got[1] == 0.0);
    CHECK(got[2] == doctest::Approx(fz).epsilon(1e-12));
    CHECK(std::abs(got[3] - tx) < 1e-9);
    CHECK(std::abs(got[4] - ty) < 1e-9);
    CHECK(std::abs(got[5] - tz) < 1e-9);
  }
}

TEST_CASE("equal speeds give pure collective thrust") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Vec6 wr = rotor_wrench(Vec4::Constant(3000.0), m);
  CHECK(wr[2] == doctest::Approx(110.0).epsilon(1e-9));
  CHECK(wr.tail<3>().norm() < 1e-9);
}

TEST_CASE("power is avionics plus a cubic in speed") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const double p1 = power_draw(Vec4::Constant(1500.0), m) - m.avionics_power;
  const double p2 = power_draw(Vec4::Constant(3000.0), m) - m.avionics_power;
  CHECK(p2 == doctest::Approx(8.0 * p1).epsilon(1e-12));
  CHECK(power_draw(Vec4::Zero(), m) == m.avionics_power);
  CHECK(power_draw(Vec4(-2000, 0, 0, 0), m) == power_draw(Vec4(2000, 0, 0, 0), m));
}

TEST_CASE("saturation clamps and keeps the back pair forward unless allowed") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const Vec4 cmd(-5000.0, 100.0, -100.0, 1e6);
  const SaturatedCommand s = saturate(cmd, m, false);
  CHECK(s.saturated);
  CHECK(s.rpm[0] == -m.speed_limit);
  CHECK(s.rpm[1] == 100.0);
  CHECK(s.rpm[2] == 0.0);
  CHECK(s.rpm[3] == m.speed_limit);
  const SaturatedCommand r = saturate(cmd, m, true);
  CHECK(r.rpm[2] == -100.0);
  CHECK_FALSE(saturate(Vec4::Constant(10.0), m, false).saturated);
}

TEST_CASE("hover speed balances weight") {
  const RotorModel m = RotorModel::from_params(RobotParams{});
  const double w = hover_speed(m, 100.0);
  CHECK(4.0 * m.thrust(w) == doctest::Approx(100.0).epsilon(1e-12));
}

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

#include "perchsim/tool.hpp"

using namespace perch;

namespace {

GantryState run_to(GantryState g, const Vec2& target, const RobotParams& p) {
  REQUIRE_FALSE(set_gantry_target(g, target, p).has_value());
  int guard = 0;
  while (!g.arrived() && guard++ < 100000) g = gantry_step(g, 0.002, p);
  REQUIRE(g.arrived());
  return g;
}

}  // namespace

TEST_CASE("backlash leaves the tool half the play behind the last move") {
  const RobotParams p;
  const double h = 0.5 * p.gantry_backlash;
  const Vec2 lim = 0.5 * p.gantry_workspace - Vec2::Constant(h);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> ux(-lim.x(), lim.x()), uy(-lim.y(), lim.y());
  GantryState g = make_gantry(Vec2::Zero(), p);
  CHECK((g.motor - g.tool - Vec2::Constant(h)).norm() < 1e-15);
  Vec2 sign = Vec2::Ones();  // take-up direction per axis
  for (int i = 0; i < 300; ++i) {
    const Vec2 target(ux(rng), uy(rng));
    const Vec2 delta = target - g.motor;
    const Vec2 before = g.tool;
    g = run_to(g, target, p);
    for (int a = 0; a < 2; ++a) {
      if (std::abs(delta[a]) >= 2.0 * h) {
        sign[a] = delta[a] > 0 ? 1.0 : -1.0;
        CHECK(std::abs(g.tool[a] - (target[a] - sign[a] * h)) < 1e-12);
      } else {
        // Short reversals may stay inside the play.
        CHECK(std::abs(g.tool[a] - g.motor[a]) <= h + 1e-12);
        if (std::abs(before[a] - target[a]) <= h) CHECK(g.tool[a] == before[a]);
      }
    }
  }
}

TEST_CASE("cumulative backlash error over a closed loop is bounded by the play") {
  const RobotParams p;
  GantryState g = make_gantry(Vec2::Zero(), p);
  const Vec2 start_tool = g.tool;
  for (int lap = 0; lap < 20; ++lap) {
    g = run_to(g, Vec2(0.05, 0.03), p);
    g = run_to(g, Vec2(-0.05, -0.03), p);
  }
  g = run_to(g, Vec2::Constant(0.5 * p.gantry_backlash), p);
  CHECK((g.tool - start_tool).norm() < 1e-12);
}

TEST_CASE("gantry respects speed limit and workspace") {
  const RobotParams p;
  GantryState g = make_gantry(Vec2::Zero(), p);
  CHECK(set_gantry_target(g, Vec2(1.0, 0.0), p).has_value());
  CHECK(in_workspace(Vec2(0.5 * p.gantry_workspace.x(), 0.0), p));
  CHECK_FALSE(in_workspace(Vec2(0.5 * p.gantry_workspace.x() + 1e-6, 0.0), p));
  REQUIRE_FALSE(set_gantry_target(g, Vec2(0.1, 0.0), p).has_value());
  const GantryState n = gantry_step(g, 0.01, p);
  CHECK((n.motor - g.motor).norm() == doctest::Approx(p.gantry_speed_limit * 0.01));
}

TEST_CASE("laser cross pixels are the rounded offset position") {
  const SensingModel s;
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-0.3, 0.3);
  for (int i = 0; i < 1000; ++i) {
    const Vec2 tool(u(rng), u(rng));
    const PixelObservation o = observe_laser_cross(tool, s);
    const Vec2 exact = (tool + s.laser_offset) / s.pixel_pitch;
    CHECK(o.pixel.x() == std::round(exact.x()));
    CHECK(o.pixel.y() == std::round(exact.y()));
    CHECK((o.pixel * s.pixel_pitch - (tool + s.laser_offset)).cwiseAbs().maxCoeff() <=
          0.5 * s.pixel_pitch + 1e-15);
    const bool inside = std::abs(o.pixel.x()) <= 80 && std::abs(o.pixel.y()) <= 60;
    CHECK(o.visible == inside);
  }
}

TEST_CASE("unquantized pixels invert exactly") {
  SensingModel s;
  s.quantize = false;
  const Vec2 tool(0.0123, -0.0456);
  const PixelObservation o = observe_laser_cross(tool, s);
  CHECK((tool_from_pixel(o.pixel, s) - tool).norm() < 1e-15);
}

TEST_CASE("a tool on target shows the cross displaced by the laser offset") {
  SensingModel s;
  s.quantize = false;
  const PixelObservation o = observe_laser_cross(Vec2::Zero(), s);
  CHECK(o.pixel.x() < 0.0);  // left
  CHECK(o.pixel.y() < 0.0);  // down
}

TEST_CASE("drilling needs more than the larger of tool and material thresholds") {
  ToolSpec tool = hammer_drill();
  Material mat;
  mat.min_feed_force = 95.0;
  CHECK(effective_min_feed(tool, mat) == 95.0);
  CHECK(drill_step(95.0, tool, mat, 0.01, 0.1) == 0.01);
  CHECK(drill_step(105.0, tool, mat, 0.01, 0.1) ==
        doctest::Approx(0.01 + tool.drill_rate_coeff * 10.0 * 0.1));
  CHECK(drill_step(1e6, tool, mat, 0.0, 10.0) == tool.max_depth);
}

TEST_CASE("hole position is the sum of its error components") {
  HoleErrorBreakdown h;
  h.target = Vec2(1, 2);
  h.alignment = Vec2(0.1, 0);
  h.backlash = Vec2(0, 0.2);
  h.slip = Vec2(0.01, 0.01);
  h.drift = Vec2(-0.02, 0);
  h.jitter = Vec2(0, -0.03);
  CHECK((hole_position(h) - Vec2(1.09, 2.18)).norm() < 1e-12);
}

TEST_CASE("balanced thrust causes no drift") {
  const RobotParams p;
  CHECK(imbalance_drift(Vec4::Ones(), 30.0, p, HoleNoise{}).isZero());
  CHECK_FALSE(imbalance_drift(Vec4(1.05, 1, 1, 1), 30.0, p, HoleNoise{}).isZero());
}

TEST_CASE("wall frame: u to the right, v up, lift inverts project") {
  const WallFrame w = WallFrame::from(Environment{});
  CHECK((w.u_axis - Vec3::UnitY()).norm() < 1e-15);
  CHECK((w.v_axis - Vec3::UnitZ()).norm() < 1e-15);
  const Vec2 uv(0.3, 1.2);
  CHECK((w.project(w.lift(uv)) - uv).norm() < 1e-15);
}

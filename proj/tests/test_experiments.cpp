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

#include <fstream>
#include <sstream>

#include "perchsim/experiments.hpp"

using namespace perch;

namespace {
const std::filesystem::path kSource = PERCHSIM_SOURCE_DIR;
}

TEST_CASE("hole statistics on a hand-built fixture") {
  // Offsets in mm: mean (2, 2/3); distances to the mean 1.2019, 1.2019, 1.3333.
  const std::vector<Vec2> offsets{Vec2(1, 0), Vec2(3, 0), Vec2(2, 2)};
  const HoleStats s = hole_statistics(offsets);
  CHECK(s.mean.x() == doctest::Approx(2.0));
  CHECK(s.mean.y() == doctest::Approx(2.0 / 3.0));
  CHECK(s.accuracy == doctest::Approx(std::sqrt(4.0 + 4.0 / 9.0)));
  CHECK(s.precision == doctest::Approx(4.0 / 3.0));
  const HoleStats one = hole_statistics({Vec2(3, 4)});
  CHECK(one.accuracy == doctest::Approx(5.0));
  CHECK(one.precision == 0.0);
}

TEST_CASE("stream seeds are distinct and reproducible") {
  CHECK(stream_seed(1, 0) == stream_seed(1, 0));
  CHECK(stream_seed(1, 0) != stream_seed(1, 1));
  CHECK(stream_seed(1, 0) != stream_seed(2, 0));
}

TEST_CASE("aim error sampling respects the truncation") {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 5000; ++i) {
    const Vec2 e = sample_aim_error(rng, 0.05, 0.1);
    CHECK(e.cwiseAbs().maxCoeff() <= 0.1);
  }
  CHECK(sample_aim_error(rng, 0.0, 0.1).isZero());
}

TEST_CASE("reachability is a point-in-box test") {
  const RobotParams p;
  // Lateral wall axis follows the 150 mm gantry axis, vertical the 210 mm one.
  CHECK(tool_point_reachable(Vec2(0.074, 0.104), p));
  CHECK_FALSE(tool_point_reachable(Vec2(0.076, 0.0), p));
  CHECK_FALSE(tool_point_reachable(Vec2(0.0, 0.106), p));
}

TEST_CASE("zero scatter perches on the nominal spot every time") {
  PerchingConfig cfg;
  cfg.trials = 4;
  cfg.sigma = 0.0;
  const PerchingResult r = run_perching_mc(ParameterSet::defaults(), cfg, 3, Exec::Serial);
  CHECK(r.max_abs_offset < 1e-9);
  CHECK(r.reachable_fraction == 1.0);
}

TEST_CASE("serial and parallel perching runs are identical") {
  PerchingConfig cfg;
  cfg.trials = 8;
  const ParameterSet ps = ParameterSet::defaults();
  const auto a = perching_report(run_perching_mc(ps, cfg, 5, Exec::Serial), cfg, 5);
  const auto b = perching_report(run_perching_mc(ps, cfg, 5, Exec::Parallel), cfg, 5);
  CHECK(a.trial_csv == b.trial_csv);
  CHECK(a.summary == b.summary);
}

TEST_CASE("serial and parallel fuzzing are identical") {
  FuzzConfig cfg;
  cfg.commands = 20000;
  cfg.streams = 8;
  const ParameterSet ps = ParameterSet::defaults();
  const FuzzResult a = run_command_fuzz(ps, cfg, 9, Exec::Serial);
  const FuzzResult b = run_command_fuzz(ps, cfg, 9, Exec::Parallel);
  CHECK(a.commands == 20000);
  CHECK(a.accepted == b.accepted);
  CHECK(a.ticks == b.ticks);
  CHECK(a.mode_visits == b.mode_visits);
  CHECK(a.tool_on_ticks == b.tool_on_ticks);
  CHECK(a.safety_violations == 0);
  CHECK(a.lock_violations == 0);
  CHECK(a.trace_violations == 0);
}

TEST_CASE("force sweep: idle rotors give no feed and avionics power only") {
  const ParameterSet ps = ParameterSet::defaults();
  const ForcePowerRow idle = measure_feed(ps, 0.0);
  CHECK(idle.feed_force == 0.0);
  CHECK(idle.power == doctest::Approx(ps.robot.avionics_power));
  const auto rows = run_force_power_sweep(ps, {1500.0, 2500.0, 3500.0});
  CHECK(rows[0].feed_force <= rows[1].feed_force);
  CHECK(rows[1].feed_force < rows[2].feed_force);
}

TEST_CASE("endurance scales with battery and shrinks with added mass") {
  const ParameterSet ps = ParameterSet::defaults();
  EnduranceInput one;
  const double t1 = run_endurance(ps, one);
  EnduranceInput two = one;
  two.battery_mass = 2.0;
  const double t2 = run_endurance(ps, two);
  CHECK(t2 == doctest::Approx(2.0 * t1));
  two.added_mass_correction = true;
  const double t2c = run_endurance(ps, two);
  CHECK(t2c < t2);
  // Momentum theory: rotor power grows with mass^1.5.
  const double m = ps.robot.total_static_mass();
  const double rotor = hover_power(ps) - ps.robot.avionics_power;
  const double p2 = ps.robot.avionics_power + rotor * std::pow((m + 1.0) / m, 1.5);
  CHECK(t2c == doctest::Approx(2.0 * 139.0 * 3600.0 / p2));
  EnduranceInput bad;
  bad.battery_mass = 0.0;
  CHECK_THROWS_AS(run_endurance(ps, bad), ContractViolation);
}

TEST_CASE("detachment replay matches the golden timeline") {
  const DetachmentReplay r = run_detachment_replay(ParameterSet::defaults(), 1);
  CHECK(r.ordered);
  CHECK(r.separated);
  CHECK(r.monotone_after_separation);
  std::ifstream in(kSource / "tests" / "golden" / "detachment.txt");
  REQUIRE(in);
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(detachment_golden(r) == golden.str());
}

TEST_CASE("reports are written as json plus two csv files") {
  const auto dir = std::filesystem::temp_directory_path() / "perchsim_report_test";
  std::filesystem::remove_all(dir);
  const ExperimentReport r = endurance_report(ParameterSet::defaults(), EnduranceInput{});
  write_report(dir, r);
  CHECK(std::filesystem::exists(dir / "endurance" / "report.json"));
  CHECK(std::filesystem::exists(dir / "endurance" / "trials.csv"));
  std::ifstream plot(dir / "endurance" / "plot.csv");
  std::string header;
  std::getline(plot, header);
  CHECK(header == "series,x,y");
  std::ifstream js(dir / "endurance" / "report.json");
  const nlohmann::json j = nlohmann::json::parse(js);
  CHECK(j["name"] == "endurance");
  CHECK(j["passed"] == true);
}

TEST_CASE("wider operator scatter still perches within a decimetre") {
  PerchingConfig cfg;
  cfg.sigma = 0.05;
  const PerchingResult r = run_perching_mc(ParameterSet::defaults(), cfg, 1, Exec::Parallel);
  CHECK(r.trials.size() == 30);
  CHECK(r.max_abs_offset <= 0.100);
  for (const auto& t : r.trials) CHECK(t.attached);
}

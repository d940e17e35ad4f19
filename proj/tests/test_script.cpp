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
#include <random>
#include <sstream>

#include "perchsim/script.hpp"

using namespace perch;

namespace {

const std::filesystem::path kSource = PERCHSIM_SOURCE_DIR;

OperatorCommand random_command(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0), t(0.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  switch (pick(rng)) {
    case 0: return SetFlightRef{Vec3(u(rng), u(rng), u(rng)), deg2rad(180.0 * u(rng))};
    case 1: return SetMode{static_cast<Mode>(std::uniform_int_distribution<int>(0, 4)(rng))};
    case 2: return Pumps{coin(rng)};
    case 3: return Valves{coin(rng)};
    case 4: return RotationThrottle{t(rng)};
    case 5: return FeedThrottle{t(rng), coin(rng) ? FeedDirection::Advance : FeedDirection::Retract};
    case 6: return GantryTarget{Vec2(0.1 * u(rng), 0.07 * u(rng))};
    case 7: return ToolPower{coin(rng)};
    default: return RampDownRotors{};
  }
}

}  // namespace

TEST_CASE("command text round trips") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 2000; ++i) {
    const OperatorCommand c = random_command(rng);
    const std::string text = format_command(c);
    const OperatorCommand back = parse_command(text);
    CHECK(back.index() == c.index());
    CHECK(format_command(back) == text);
  }
}

TEST_CASE("malformed commands are parse errors") {
  for (const char* bad : {"", "fly", "pumps maybe", "mode hover", "gantry 0.1", "feed_throttle 0.5",
                          "flight_ref 1 2 3", "rotation_throttle fast", "tool on now"}) {
    CHECK_THROWS_AS(parse_command(bad), ParseError);
  }
}

TEST_CASE("the shipped nominal mission parses and round trips") {
  const MissionScript s = load_script(kSource / "missions" / "nominal.mission");
  CHECK(s.entries.size() > 10);
  const MissionScript again = parse_script(format_script(s));
  REQUIRE(again.entries.size() == s.entries.size());
  for (std::size_t i = 0; i < s.entries.size(); ++i) {
    CHECK(format_trigger(again.entries[i].trigger) == format_trigger(s.entries[i].trigger));
    CHECK(format_command(again.entries[i].command) == format_command(s.entries[i].command));
  }
}

TEST_CASE("script errors name the line") {
  try {
    parse_script("at 0 pumps on\n# comment\nsoon pumps off\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_script("when sunrise pumps on\n"), ParseError);
  CHECK_THROWS_AS(parse_script("at -1 pumps on\n"), ParseError);
  CHECK_THROWS_AS(load_script(kSource / "missions" / "missing.mission"), ParseError);
}

TEST_CASE("telemetry CSV header is frozen") {
  CHECK(telemetry_csv_header() ==
        "time,mode,hinge,theta_deg,slide_mm,pos_x,pos_y,pos_z,q_w,q_x,q_y,q_z,"
        "rpm_fl,rpm_fr,rpm_bl,rpm_br,cup0_kpa,cup1_kpa,cup0_attached,cup1_attached,"
        "pumps_on,valves_open,feed_force_n,power_w,gantry_x_mm,gantry_y_mm,drill_depth_mm,"
        "tool_on,laser_u_px,laser_v_px,laser_visible,wall_distance_m,detach_phase,"
        "last_rejection");
  TelemetryRecord r;
  std::ostringstream os;
  write_csv_row(os, r);
  const std::string row = os.str();
  const auto commas = [](std::string_view s) { return std::count(s.begin(), s.end(), ','); };
  CHECK(commas(row) == commas(telemetry_csv_header()));
}

TEST_CASE("telemetry JSON round trips and carries the schema version") {
  ParameterSet ps = ParameterSet::defaults();
  Simulation sim(ps, SimConfig{}, 1);
  sim.submit(Pumps{true});
  sim.run_for(0.5);
  const TelemetryRecord r = sim.telemetry();
  const nlohmann::json j = to_json(r);
  CHECK(j["schema"] == kTelemetrySchemaVersion);
  CHECK(j["type"] == "telemetry");
  const TelemetryRecord back = telemetry_from_json(j);
  CHECK(to_json(back) == j);
  CHECK(back.pumps_on);
  nlohmann::json wrong = j;
  wrong["schema"] = 99;
  CHECK_THROWS_AS(telemetry_from_json(wrong), ParseError);
}

TEST_CASE("the golden telemetry capture decodes") {
  std::ifstream in(kSource / "tests" / "golden" / "telemetry_capture.jsonl");
  REQUIRE(in);
  std::string line;
  int n = 0;
  double last = -1.0;
  while (std::getline(in, line)) {
    const TelemetryRecord r = telemetry_from_json(nlohmann::json::parse(line));
    CHECK(r.time > last);
    last = r.time;
    ++n;
  }
  CHECK(n > 10);
}

TEST_CASE("parameter files round trip and reject unknown keys") {
  const ParameterSet d = ParameterSet::defaults();
  const std::string text = format_params(d);
  const ParameterSet back = parse_params(text);
  CHECK(format_params(back) == text);
  CHECK_THROWS_AS(parse_params("robot.not_a_thing = 3\n"), ParseError);
  CHECK_THROWS_AS(parse_params("robot.mass_base = heavy\n"), ParseError);
  const ParameterSet tweaked = parse_params("robot.mass_base = 7.0 ; measured\n");
  CHECK(tweaked.robot.mass_base == 7.0);
  CHECK(tweaked.provenance.at("robot.mass_base") == "measured");
}

TEST_CASE("the shipped default parameter file matches the built-in defaults") {
  const ParameterSet f = load_params(kSource / "params" / "default.params");
  CHECK(format_params(f) == format_params(ParameterSet::defaults()));
}

TEST_CASE("state serialisation is bit exact") {
  ParameterSet ps = ParameterSet::defaults();
  Simulation sim(ps, SimConfig{}, 1);
  sim.submit(SetFlightRef{Vec3(0.3, 0.1, 0.0), kPi});
  sim.run_for(0.7);
  const SimState s = sim.state();
  CHECK(bitwise_equal(deserialize(serialize(s)), s));
}

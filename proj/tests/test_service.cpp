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

#include <chrono>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

#include "service.hpp"

using namespace perch;
using namespace perch::service;

namespace {

const std::filesystem::path kSource = PERCHSIM_SOURCE_DIR;

std::filesystem::path scratch(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("perchsim_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::string command_json(const std::string& text, int id = 0) {
  return nlohmann::json{{"type", "command"}, {"command", text}, {"id", id}}.dump();
}

}  // namespace

TEST_CASE("nominal mission runs to completion") {
  const auto out = scratch("run_nominal");
  RunOptions o;
  o.script = kSource / "missions" / "nominal.mission";
  o.out = out;
  std::ostringstream log;
  const RunResult r = cli_run(o, log);
  CHECK(r.exit_code == kExitOk);
  CHECK(r.telemetry_rows > 100);
  CHECK(is_valid_mode_trace(r.mode_trace));
  CHECK(r.mode_trace.size() == 6);
  const auto rows = read_lines(out / "telemetry.csv");
  CHECK(rows.front() == telemetry_csv_header());
  CHECK(static_cast<long long>(rows.size()) == r.telemetry_rows + 1);
  const auto events = read_lines(out / "events.log");
  CHECK(events.back() == "end mission complete");
  CHECK(std::filesystem::exists(out / "summary.json"));
}

TEST_CASE("a guard rejection aborts with exit code 3 and is logged") {
  const auto out = scratch("run_reject");
  std::ofstream(out / "bad.mission") << "at 0 pumps on\nat 0.1 tool on\n";
  RunOptions o;
  o.script = out / "bad.mission";
  o.out = out;
  std::ostringstream log;
  const RunResult r = cli_run(o, log);
  CHECK(r.exit_code == kExitRejected);
  CHECK(r.message.find("line 2") != std::string::npos);
  bool logged = false;
  for (const auto& l : read_lines(out / "events.log")) {
    logged = logged || l.find("rejected tool on") != std::string::npos;
  }
  CHECK(logged);
}

TEST_CASE("unreadable inputs exit with code 2") {
  const auto out = scratch("run_missing");
  RunOptions o;
  o.script = kSource / "missions" / "nominal.mission";
  o.params = out / "missing.params";
  o.out = out;
  std::ostringstream log;
  CHECK(cli_run(o, log).exit_code == kExitParseError);
  std::ofstream(out / "broken.mission") << "at zero pumps on\n";
  o.params.reset();
  o.script = out / "broken.mission";
  CHECK(cli_run(o, log).exit_code == kExitParseError);
  ExperimentOptions e;
  e.name = "nope";
  CHECK(run_experiment(e, log) == kExitParseError);
}

TEST_CASE("default port honours the environment") {
  ::setenv(kPortEnv, "9123", 1);
  CHECK(default_port() == 9123);
  ::setenv(kPortEnv, "not-a-port", 1);
  CHECK(default_port() == kDefaultPort);
  ::unsetenv(kPortEnv);
  CHECK(default_port() == kDefaultPort);
}

TEST_CASE("hub answers malformed input with an error frame and leaves the sim alone") {
  TeleopHub hub(ParameterSet::defaults(), 1);
  std::vector<std::string> replies;
  auto sink = [&](const std::string& s) { replies.push_back(s); };
  hub.advance(5);
  const SimState before = hub.sim().state();
  for (const char* bad : {"not json", "[1,2]", R"({"type":"command"})",
                          R"({"type":"command","command":"launch"})", R"({"type":"chat"})"}) {
    hub.receive(bad, sink);
  }
  CHECK(replies.size() == 5);
  for (const auto& r : replies) CHECK(nlohmann::json::parse(r)["type"] == "error");
  CHECK(hub.pending() == 0);
  CHECK(bitwise_equal(hub.sim().state(), before));
}

TEST_CASE("hub: pumps on shows up in the next telemetry") {
  TeleopHub hub(ParameterSet::defaults(), 1);
  std::vector<nlohmann::json> telemetry;
  hub.set_broadcast([&](const std::string& s) { telemetry.push_back(nlohmann::json::parse(s)); });
  std::vector<nlohmann::json> replies;
  hub.receive(command_json("pumps on", 7),
              [&](const std::string& s) { replies.push_back(nlohmann::json::parse(s)); });
  hub.advance(hub.sim().config().telemetry_every);
  REQUIRE(replies.size() == 1);
  CHECK(replies[0]["type"] == "ack");
  CHECK(replies[0]["id"] == 7);
  CHECK(replies[0]["accepted"] == true);
  REQUIRE(telemetry.size() == 1);
  CHECK(telemetry[0]["pumps_on"] == true);

  hub.receive(command_json("tool on", 8),
              [&](const std::string& s) { replies.push_back(nlohmann::json::parse(s)); });
  hub.advance(hub.sim().config().telemetry_every);
  REQUIRE(replies.size() == 2);
  CHECK(replies[1]["accepted"] == false);
  CHECK(telemetry.back()["last_rejection"].get<std::string>().find("tool on") != std::string::npos);
}

TEST_CASE("interactive replay of a scripted mission gives the same trace and state") {
  const ParameterSet ps = ParameterSet::defaults();
  const MissionScript script = load_script(kSource / "missions" / "nominal.mission");
  Simulation scripted(ps, SimConfig{}, 4);
  ScriptPlayer player(script);
  std::vector<std::pair<long long, std::string>> issued;
  while (!player.finished() && scripted.state().time < 300.0) {
    const std::size_t before = player.next_index();
    REQUIRE_FALSE(player.poll(scripted).has_value());
    for (std::size_t i = before; i < player.next_index(); ++i) {
      issued.push_back({scripted.ticks(), format_command(script.entries[i].command)});
    }
    scripted.tick();
  }
  REQUIRE(player.finished());

  TeleopHub hub(ps, 4);
  auto ignore = [](const std::string&) {};
  for (const auto& [tick, text] : issued) {
    hub.advance(tick - hub.sim().ticks());
    hub.receive(command_json(text), ignore);
  }
  hub.advance(scripted.ticks() - hub.sim().ticks());
  CHECK(hub.sim().mode_trace() == scripted.mode_trace());
  CHECK(bitwise_equal(hub.sim().state(), scripted.state()));
}

namespace {

namespace beast = boost::beast;
namespace net = boost::asio;
using tcp = net::ip::tcp;

struct Client {
  net::io_context ioc;
  beast::websocket::stream<tcp::socket> ws{ioc};

  explicit Client(int port) {
    tcp::resolver resolver(ioc);
    net::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(port)));
    ws.handshake("127.0.0.1", "/");
  }
  void send(const std::string& s) { ws.write(net::buffer(s)); }
  nlohmann::json read() {
    beast::flat_buffer buf;
    ws.read(buf);
    return nlohmann::json::parse(beast::buffers_to_string(buf.data()));
  }
};

}  // namespace

TEST_CASE("websocket: two viewers see the same stream and commands take effect") {
  ServeOptions o;
  o.port = 0;
  o.rate = 5.0;
  TeleopServer server(o);
  server.start();
  Client a(server.port());
  Client b(server.port());
  a.send(command_json("pumps on", 1));
  a.send("{broken");

  bool acked = false, errored = false, pumps_seen = false;
  std::map<double, std::string> seen_a;
  for (int i = 0; i < 400 && !(acked && errored && pumps_seen && seen_a.size() > 20); ++i) {
    const nlohmann::json j = a.read();
    if (j["type"] == "ack") acked = j["accepted"] == true;
    if (j["type"] == "error") errored = true;
    if (j["type"] == "telemetry") {
      seen_a[j["time"].get<double>()] = j.dump();
      pumps_seen = pumps_seen || j["pumps_on"] == true;
    }
  }
  CHECK(acked);
  CHECK(errored);
  CHECK(pumps_seen);

  int matched = 0;
  for (int i = 0; i < 200 && matched < 10; ++i) {
    const nlohmann::json j = b.read();
    CHECK(j["type"] == "telemetry");
    const auto it = seen_a.find(j["time"].get<double>());
    if (it != seen_a.end()) {
      CHECK(it->second == j.dump());
      ++matched;
    }
  }
  CHECK(matched >= 10);
  server.stop();
}

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

#include "service.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <ostream>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>

namespace perch::service {

namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace net = boost::asio;
using tcp = net::ip::tcp;

int default_port() {
  const char* env = std::getenv(kPortEnv);
  if (env == nullptr || *env == '\0') return kDefaultPort;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 0 || v > 65535) return kDefaultPort;
  return static_cast<int>(v);
}

ParameterSet load_params_or_defaults(const std::optional<std::filesystem::path>& path) {
  if (!path || path->empty()) return ParameterSet::defaults();
  try {
    return load_params(*path);
  } catch (const ContractViolation& e) {
    throw ParseError(std::string("invalid parameters: ") + e.what());
  }
}

// --- headless run ---------------------------------------------------------

RunResult cli_run(const RunOptions& opt, std::ostream& log) {
  RunResult res;
  ParameterSet params;
  MissionScript script;
  try {
    params = load_params_or_defaults(opt.params);
    script = load_script(opt.script);
  } catch (const ParseError& e) {
    res.exit_code = kExitParseError;
    res.message = e.what();
    log << "error: " << res.message << "\n";
    return res;
  }

  std::filesystem::create_directories(opt.out);
  std::ofstream csv(opt.out / "telemetry.csv");
  csv << telemetry_csv_header() << "\n";
  Simulation sim(params, SimConfig{}, opt.seed);
  sim.set_telemetry_sink([&](const TelemetryRecord& r) {
    write_csv_row(csv, r);
    ++res.telemetry_rows;
  });

  ScriptPlayer player(script);
  double finished_at = -1.0;
  for (;;) {
    if (const auto rej = player.poll(sim)) {
      res.exit_code = kExitRejected;
      res.message = "line " + std::to_string(rej->line) + ": '" + rej->command +
                    "' rejected: " + rej->reason;
      break;
    }
    if (sim.failed()) {
      res.exit_code = kExitFailure;
      res.message = "mission failed: " + sim.failure();
      break;
    }
    const double now = sim.state().time;
    if (player.finished()) {
      if (finished_at < 0.0) finished_at = now;
      if (now >= finished_at + opt.tail - 1e-9) break;
    }
    if (now >= opt.max_time) {
      res.exit_code = kExitFailure;
      res.message = "timed out waiting for script entry " + std::to_string(player.next_index() + 1);
      break;
    }
    sim.tick();
  }
  if (res.exit_code == kExitOk) res.message = "mission complete";

  std::ofstream events(opt.out / "events.log");
  for (const auto& e : sim.events()) events << std::fixed << e.time << " " << e.text << "\n";
  events << "end " << res.message << "\n";

  res.mode_trace = sim.mode_trace();
  res.final_time = sim.state().time;
  nlohmann::json trace = nlohmann::json::array();
  for (Mode m : res.mode_trace) trace.push_back(to_string(m));
  nlohmann::json summary = {{"exit_code", res.exit_code},
                            {"message", res.message},
                            {"seed", opt.seed},
                            {"final_time", res.final_time},
                            {"mode_trace", trace},
                            {"telemetry_rows", res.telemetry_rows}};
  std::ofstream(opt.out / "summary.json") << summary.dump(2) << "\n";
  log << res.message << " (t=" << res.final_time << " s, " << res.telemetry_rows
      << " telemetry rows)\n";
  return res;
}

// --- experiments ----------------------------------------------------------

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"force_power", "endurance", "perching",
                                                 "drilling",    "detachment", "fuzz"};
  return names;
}

namespace {

ExperimentReport run_named(const std::string& name, const ParameterSet& params,
                           const ExperimentOptions& opt) {
  const Exec exec = opt.serial ? Exec::Serial : Exec::Parallel;
  if (name == "force_power") return force_power_report(params);
  if (name == "endurance") return endurance_report(params, EnduranceInput{});
  if (name == "perching") {
    const PerchingConfig cfg;
    return perching_report(run_perching_mc(params, cfg, opt.seed, exec), cfg, opt.seed);
  }
  if (name == "drilling") {
    const DrillingConfig cfg;
    return drilling_report(run_drilling_study(params, cfg, opt.seed, exec), cfg, opt.seed);
  }
  if (name == "detachment") return detachment_report(run_detachment_replay(params, opt.seed), opt.seed);
  FuzzConfig cfg;
  cfg.commands = opt.fuzz_commands;
  return fuzz_report(run_command_fuzz(params, cfg, opt.seed, exec), opt.seed);
}

}  // namespace

int run_experiment(const ExperimentOptions& opt, std::ostream& log) {
  std::vector<std::string> names;
  if (opt.name == "all") {
    names = experiment_names();
  } else {
    const auto& known = experiment_names();
    if (std::find(known.begin(), known.end(), opt.name) == known.end()) {
      log << "error: unknown experiment '" << opt.name << "'\n";
      return kExitParseError;
    }
    names.push_back(opt.name);
  }
  ParameterSet params;
  try {
    params = load_params_or_defaults(opt.params);
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kExitParseError;
  }
  bool all_passed = true;
  for (const auto& name : names) {
    ExperimentReport r = run_named(name, params, opt);
    r.seed = opt.seed;
    write_report(opt.out, r);
    log << (r.passed ? "PASS " : "FAIL ") << r.name << " " << r.summary.dump() << "\n";
    all_passed = all_passed && r.passed;
  }
  return all_passed ? kExitOk : kExitFailure;
}

// --- teleop hub -----------------------------------------------------------

nlohmann::json error_frame(const std::string& error, const nlohmann::json& id) {
  return {{"schema", kTelemetrySchemaVersion}, {"type", "error"}, {"id", id}, {"error", error}};
}

TeleopHub::TeleopHub(ParameterSet params, std::uint64_t seed, SimConfig config)
    : sim_(std::move(params), config, seed) {
  sim_.set_telemetry_sink([this](const TelemetryRecord& r) {
    if (broadcast_) broadcast_(to_json(r).dump() + "\n");
  });
}

void TeleopHub::set_broadcast(Sink sink) { broadcast_ = std::move(sink); }

std::size_t TeleopHub::pending() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

void TeleopHub::receive(const std::string& message, Sink reply) {
  nlohmann::json id = nullptr;
  try {
    const nlohmann::json j = nlohmann::json::parse(message);
    if (!j.is_object()) throw ParseError("message must be a JSON object");
    if (j.contains("id")) id = j["id"];
    if (j.value("type", std::string("command")) != "command") {
      throw ParseError("unsupported message type");
    }
    if (!j.contains("command") || !j["command"].is_string()) {
      throw ParseError("missing string field 'command'");
    }
    OperatorCommand cmd = parse_command(j["command"].get<std::string>());
    std::lock_guard lock(mutex_);
    queue_.push_back({std::move(cmd), id, std::move(reply)});
  } catch (const nlohmann::json::exception& e) {
    if (reply) reply(error_frame(std::string("malformed JSON: ") + e.what(), id).dump() + "\n");
  } catch (const ParseError& e) {
    if (reply) reply(error_frame(e.what(), id).dump() + "\n");
  }
}

void TeleopHub::drain() {
  std::deque<Pending> batch;
  {
    std::lock_guard lock(mutex_);
    batch.swap(queue_);
  }
  for (auto& p : batch) {
    const CommandOutcome out = sim_.submit(p.command);
    if (!p.reply) continue;
    nlohmann::json ack = {{"schema", kTelemetrySchemaVersion},
                          {"type", "ack"},
                          {"id", p.id},
                          {"time", sim_.state().time},
                          {"command", format_command(p.command)},
                          {"accepted", out.accepted}};
    if (!out.accepted) ack["reason"] = out.reason;
    p.reply(ack.dump() + "\n");
  }
}

void TeleopHub::advance(long long ticks) {
  drain();
  for (long long i = 0; i < ticks; ++i) sim_.tick();
}

// --- websocket server -----------------------------------------------------

namespace {

constexpr std::size_t kMaxQueuedFrames = 4096;

class Session : public std::enable_shared_from_this<Session> {
 public:
  Session(tcp::socket socket, TeleopHub* hub) : ws_(std::move(socket)), hub_(hub) {}

  void run(std::function<void(std::shared_ptr<Session>)> on_open) {
    on_open_ = std::move(on_open);
    net::dispatch(ws_.get_executor(), [self = shared_from_this()] {
      self->ws_.set_option(websocket::stream_base::timeout::suggested(beast::role_type::server));
      self->ws_.async_accept(beast::bind_front_handler(&Session::on_accept, self));
    });
  }

  void send(std::shared_ptr<const std::string> frame) {
    net::post(ws_.get_executor(), [self = shared_from_this(), frame] {
      if (self->closed_) return;
      if (self->queue_.size() >= kMaxQueuedFrames) return;
      self->queue_.push_back(frame);
      if (self->queue_.size() == 1) self->write_next();
    });
  }

  bool closed() const { return closed_; }

 private:
  void on_accept(beast::error_code ec) {
    if (ec) return;
    ws_.text(true);
    on_open_(shared_from_this());
    read_next();
  }

  void read_next() {
    ws_.async_read(buffer_, beast::bind_front_handler(&Session::on_read, shared_from_this()));
  }

  void on_read(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      return;
    }
    const std::string msg = beast::buffers_to_string(buffer_.data());
    buffer_.consume(buffer_.size());
    std::weak_ptr<Session> weak = shared_from_this();
    hub_->receive(msg, [weak](const std::string& frame) {
      if (auto s = weak.lock()) s->send(std::make_shared<const std::string>(frame));
    });
    read_next();
  }

  void write_next() {
    ws_.async_write(net::buffer(*queue_.front()),
                    beast::bind_front_handler(&Session::on_write, shared_from_this()));
  }

  void on_write(beast::error_code ec, std::size_t) {
    if (ec) {
      closed_ = true;
      queue_.clear();
      return;
    }
    queue_.pop_front();
    if (!queue_.empty()) write_next();
  }

  websocket::stream<beast::tcp_stream> ws_;
  TeleopHub* hub_;
  beast::flat_buffer buffer_;
  std::deque<std::shared_ptr<const std::string>> queue_;
  std::function<void(std::shared_ptr<Session>)> on_open_;
  std::atomic<bool> closed_{false};
};

}  // namespace

struct TeleopServer::Impl {
  ServeOptions options;
  TeleopHub hub;
  net::io_context ioc{1};
  tcp::acceptor acceptor{ioc};
  std::thread net_thread;
  std::thread sim_thread;
  std::atomic<bool> running{false};
  std::mutex sessions_mutex;
  std::vector<std::shared_ptr<Session>> sessions;

  explicit Impl(const ServeOptions& opt)
      : options(opt), hub(load_params_or_defaults(opt.params), opt.seed) {
    require(opt.rate > 0.0, "real-time factor must be positive");
    hub.set_broadcast([this](const std::string& line) { broadcast(line); });
  }

  void broadcast(const std::string& line) {
    auto frame = std::make_shared<const std::string>(line);
    std::lock_guard lock(sessions_mutex);
    std::erase_if(sessions, [](const auto& s) { return s->closed(); });
    for (auto& s : sessions) s->send(frame);
  }

  void accept_next() {
    acceptor.async_accept(net::make_strand(ioc), [this](beast::error_code ec, tcp::socket socket) {
      if (ec) return;
      auto session = std::make_shared<Session>(std::move(socket), &hub);
      session->run([this](std::shared_ptr<Session> s) {
        std::lock_guard lock(sessions_mutex);
        sessions.push_back(std::move(s));
      });
      accept_next();
    });
  }

  void sim_loop() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const double dt = hub.sim().config().dt;
    long long done = 0;
    while (running) {
      const double wall = std::chrono::duration<double>(clock::now() - t0).count();
      const long long due = static_cast<long long>(std::floor(options.rate * wall / dt));
      hub.advance(std::max(0LL, due - done));
      done = std::max(done, due);
      std::this_thread::sleep_for(std::chrono::milliseconds(2));
    }
  }
};

TeleopServer::TeleopServer(const ServeOptions& options) : impl_(std::make_unique<Impl>(options)) {}

TeleopServer::~TeleopServer() { stop(); }

void TeleopServer::start() {
  Impl& m = *impl_;
  const tcp::endpoint ep(net::ip::make_address("0.0.0.0"), static_cast<unsigned short>(m.options.port));
  m.acceptor.open(ep.protocol());
  m.acceptor.set_option(net::socket_base::reuse_address(true));
  m.acceptor.bind(ep);
  m.acceptor.listen(net::socket_base::max_listen_connections);
  m.running = true;
  m.accept_next();
  m.net_thread = std::thread([&m] { m.ioc.run(); });
  m.sim_thread = std::thread([&m] { m.sim_loop(); });
}

void TeleopServer::stop() {
  Impl& m = *impl_;
  if (!m.running.exchange(false)) return;
  if (m.sim_thread.joinable()) m.sim_thread.join();
  m.ioc.stop();
  if (m.net_thread.joinable()) m.net_thread.join();
  beast::error_code ec;
  m.acceptor.close(ec);
  std::lock_guard lock(m.sessions_mutex);
  m.sessions.clear();
}

int TeleopServer::port() const { return impl_->acceptor.local_endpoint().port(); }

namespace {
std::atomic<bool> g_stop{false};
void on_signal(int) { g_stop = true; }
}  // namespace

int serve_teleop(const ServeOptions& options, std::ostream& log) {
  std::unique_ptr<TeleopServer> server;
  try {
    server = std::make_unique<TeleopServer>(options);
    server->start();
  } catch (const ParseError& e) {
    log << "error: " << e.what() << "\n";
    return kExitParseError;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  log << "serving on ws://0.0.0.0:" << server->port() << " (rate " << options.rate << ")\n";
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  while (!g_stop) std::this_thread::sleep_for(std::chrono::milliseconds(100));
  server->stop();
  return kExitOk;
}

}  // namespace perch::service

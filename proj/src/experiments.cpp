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

#include "perchsim/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace perch {

namespace {

std::string num(double v, int precision = 6) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(precision);
  os << v;
  std::string out = os.str();
  if (out.front() == '-' && out.find_first_not_of("-0.") == std::string::npos) out.erase(0, 1);
  return out;
}

template <class Fn>
void for_each_trial(int n, Exec exec, Fn&& fn) {
  if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) fn(i);
  } else {
    for (int i = 0; i < n; ++i) fn(i);
  }
}

// Attachment pose and tool point of a robot perched flush where `sim` attached.
Vec2 centred_tool_uv(const Simulation& sim) {
  SimState s = sim.state();
  s.hinge_theta = 0.5 * kPi;
  s.hinge_slide = 0.0;
  s.gantry_pos = sim.params().robot.gantry_center;
  s.body_pose = body_from_attachment(s.attachment_pose, s.hinge_theta, 0.0, sim.params().robot);
  return sim.wall().project(frame_in_world(s, Frame::Tool, sim.params().robot).translation());
}

struct Approach {
  bool attached = false;
  Vec2 attachment_uv = Vec2::Zero();
  Vec2 tool_uv = Vec2::Zero();
};

Approach fly_in(Simulation& sim, double speed, double timeout) {
  Approach a;
  sim.submit(Pumps{true});
  sim.submit(SetFlightRef{Vec3(speed, 0.0, 0.0), sim.config().start_heading});
  const double deadline = sim.state().time + timeout;
  bool perching = false;
  while (sim.state().time < deadline && !sim.failed()) {
    if (!perching && sim.view().contact) perching = sim.submit(SetMode{Mode::Perching}).accepted;
    if (perching && sim.view().attached) {
      a.attached = true;
      a.attachment_uv = sim.attachment_uv();
      a.tool_uv = centred_tool_uv(sim);
      return a;
    }
    sim.tick();
  }
  return a;
}

SimConfig approach_config(const ParameterSet& params, double standoff, const Vec2& aim) {
  SimConfig cfg;
  const WallFrame wall = WallFrame::from(params.env);
  const Vec3 n = params.env.wall_normal.normalized();
  cfg.start_position = wall.lift(Vec2(0.0, 1.5)) + standoff * n + aim.x() * wall.u_axis +
                       aim.y() * wall.v_axis;
  cfg.start_heading = std::atan2(-n.y(), -n.x());
  return cfg;
}

}  // namespace

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index) {
  // splitmix64 over the pair
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void write_report(const std::filesystem::path& dir, const ExperimentReport& report) {
  const auto out = dir / report.name;
  std::filesystem::create_directories(out);
  nlohmann::json j{{"name", report.name},       {"seed", report.seed},
                   {"passed", report.passed},   {"summary", report.summary},
                   {"reference", report.reference}, {"trials", report.trials}};
  std::ofstream(out / "report.json") << j.dump(2) << "\n";
  std::ofstream(out / "trials.csv") << report.trial_csv;
  std::ofstream(out / "plot.csv") << report.long_csv;
}

HoleStats hole_statistics(const std::vector<Vec2>& offsets) {
  HoleStats s;
  if (offsets.empty()) return s;
  for (const auto& e : offsets) s.mean += e;
  s.mean /= static_cast<double>(offsets.size());
  s.accuracy = s.mean.norm();
  for (const auto& e : offsets) s.precision = std::max(s.precision, (e - s.mean).norm());
  return s;
}

// --- force / power --------------------------------------------------------

ForcePowerRow measure_feed(const ParameterSet& params, double rpm, double settle_time) {
  const DynamicsModel model = DynamicsModel::from(params);
  SimState s;
  s.attachment_pose.orientation = Quat(Eigen::AngleAxisd(kPi, Vec3::UnitZ()));
  s.attachment_pose.position = params.env.wall_point + Vec3(0.0, 0.0, 1.5);
  s.hinge_theta = 0.5 * kPi;
  s.gantry_pos = params.robot.gantry_center;
  s.attached = {true, true};
  s.rotor_speeds = Vec4::Constant(rpm);
  s.body_pose = body_from_attachment(s.attachment_pose, s.hinge_theta, 0.0, params.robot);
  const ConstraintRegime regime{Regime::Perched, freedoms_of(HingeLockState::RotationLocked)};
  StepDiagnostics diag;
  const double dt = 0.002;
  const int n = static_cast<int>(std::lround(settle_time / dt));
  for (int i = 0; i < n; ++i) s = step(s, Vec4::Constant(rpm), regime, dt, model, &diag);
  return ForcePowerRow{rpm, diag.gross_feed_thrust, diag.contact_force,
                       power_draw(s.rotor_speeds, model.rotors)};
}

std::vector<ForcePowerRow> run_force_power_sweep(const ParameterSet& params,
                                                 const std::vector<double>& rpms) {
  std::vector<ForcePowerRow> rows;
  rows.reserve(rpms.size());
  for (double w : rpms) rows.push_back(measure_feed(params, w));
  return rows;
}

double hover_power(const ParameterSet& params) {
  const RotorModel rotors = RotorModel::from_params(params.robot);
  const double w = hover_speed(rotors, params.robot.total_static_mass() * params.env.gravity);
  return power_draw(Vec4::Constant(w), rotors);
}

ExperimentReport force_power_report(const ParameterSet& params) {
  std::vector<double> rpms;
  for (double w = 0.0; w <= params.robot.rotor_speed_limit + 1e-9; w += 300.0) rpms.push_back(w);
  if (std::find(rpms.begin(), rpms.end(), 3000.0) == rpms.end()) rpms.push_back(3000.0);
  std::sort(rpms.begin(), rpms.end());
  const auto rows = run_force_power_sweep(params, rpms);

  ExperimentReport r;
  r.name = "force_power";
  r.trial_csv = "rpm,gross_feed_n,feed_force_n,power_w\n";
  r.long_csv = "series,x,y\n";
  for (const auto& row : rows) {
    r.trials.push_back({{"rpm", row.rpm}, {"gross_feed_n", row.gross_feed},
                        {"feed_force_n", row.feed_force}, {"power_w", row.power}});
    r.trial_csv += num(row.rpm, 1) + "," + num(row.gross_feed) + "," + num(row.feed_force) + "," +
                   num(row.power) + "\n";
    r.long_csv += "feed_force," + num(row.rpm, 1) + "," + num(row.feed_force) + "\n";
    r.long_csv += "power," + num(row.rpm, 1) + "," + num(row.power) + "\n";
  }
  const ForcePowerRow at3000 = measure_feed(params, 3000.0);
  const ForcePowerRow atmax = measure_feed(params, params.robot.rotor_speed_limit);
  const double hover = hover_power(params);
  r.summary = {{"gross_feed_at_3000_n", at3000.gross_feed},
               {"feed_force_at_max_n", atmax.feed_force},
               {"hover_power_w", hover},
               {"manipulation_power_at_3000_w", at3000.power}};
  r.reference = {{"gross_feed_at_3000_n", {110.0, 4.0}},
                 {"feed_force_at_max_n", {150.0, 5.0}},
                 {"power_w", {2000.0, 200.0}}};
  r.passed = std::abs(at3000.gross_feed - 110.0) <= 4.0 && std::abs(atmax.feed_force - 150.0) <= 5.0 &&
             std::abs(hover - 2000.0) <= 200.0 && std::abs(at3000.power - 2000.0) <= 200.0 &&
             std::abs(hover - at3000.power) <= 0.1 * std::max(hover, at3000.power);
  return r;
}

// --- endurance ------------------------------------------------------------

double run_endurance(const ParameterSet& params, const EnduranceInput& in) {
  require(in.battery_mass > 0.0 && in.specific_energy > 0.0, "battery inputs must be positive");
  const double energy = in.battery_mass * in.specific_energy * 3600.0;
  double power = hover_power(params);
  if (in.added_mass_correction) {
    const double m = params.robot.total_static_mass();
    const double m_new = m + (in.battery_mass - in.baseline_battery_mass);
    const double rotor = power - params.robot.avionics_power;
    power = params.robot.avionics_power + rotor * std::pow(m_new / m, 1.5);
  }
  return energy / power;
}

ExperimentReport endurance_report(const ParameterSet& params, const EnduranceInput& in) {
  ExperimentReport r;
  r.name = "endurance";
  r.trial_csv = "battery_kg,specific_wh_per_kg,endurance_s,endurance_corrected_s\n";
  r.long_csv = "series,x,y\n";
  for (int i = 1; i <= 6; ++i) {
    EnduranceInput row = in;
    row.battery_mass = 0.5 * i;
    const double plain = run_endurance(params, row);
    row.added_mass_correction = true;
    const double corrected = run_endurance(params, row);
    r.trials.push_back({{"battery_kg", row.battery_mass},
                        {"endurance_s", plain},
                        {"endurance_corrected_s", corrected}});
    r.trial_csv += num(row.battery_mass, 2) + "," + num(row.specific_energy, 2) + "," + num(plain) +
                   "," + num(corrected) + "\n";
    r.long_csv += "endurance_s," + num(row.battery_mass, 2) + "," + num(plain) + "\n";
    r.long_csv += "endurance_corrected_s," + num(row.battery_mass, 2) + "," + num(corrected) + "\n";
  }
  const double seconds = run_endurance(params, in);
  r.summary = {{"battery_kg", in.battery_mass},
               {"specific_wh_per_kg", in.specific_energy},
               {"endurance_s", seconds}};
  r.reference = {{"endurance_s", {250.0, 25.0}}};
  r.passed = std::abs(seconds - 250.0) <= 25.0;
  return r;
}

// --- perching Monte Carlo -------------------------------------------------

Vec2 sample_aim_error(std::mt19937_64& rng, double sigma, double truncation) {
  if (sigma <= 0.0) return Vec2::Zero();
  std::normal_distribution<double> n(0.0, sigma);
  Vec2 e;
  for (int i = 0; i < 2; ++i) {
    do {
      e[i] = n(rng);
    } while (std::abs(e[i]) > truncation);
  }
  return e;
}

bool tool_point_reachable(const Vec2& offset, const RobotParams& robot) {
  // Wall u follows body y and wall v follows body x once the table is tilted.
  const Vec2 half = 0.5 * robot.gantry_workspace;
  return std::abs(offset.x()) <= half.y() && std::abs(offset.y()) <= half.x();
}

PerchingResult run_perching_mc(const ParameterSet& params, const PerchingConfig& config,
                               std::uint64_t seed, Exec exec) {
  require(config.trials >= 1, "need at least one trial");
  PerchingResult result;
  {
    Simulation ref(params, approach_config(params, config.standoff, Vec2::Zero()), seed);
    const Approach a = fly_in(ref, 0.4, 60.0);
    require(a.attached, "reference approach did not perch");
    result.nominal = a.attachment_uv;
  }
  result.trials.resize(config.trials);
  for_each_trial(config.trials, exec, [&](int i) {
    std::mt19937_64 rng(stream_seed(seed, i));
    PerchTrial t;
    t.aim_error = sample_aim_error(rng, config.sigma, config.truncation);
    Simulation sim(params, approach_config(params, config.standoff, t.aim_error), rng());
    const Approach a = fly_in(sim, 0.4, 60.0);
    t.attached = a.attached;
    t.offset = a.attachment_uv - result.nominal;
    t.reachable = a.attached && tool_point_reachable(t.offset, params.robot);
    result.trials[i] = t;
  });
  int reachable = 0;
  for (const auto& t : result.trials) {
    result.max_abs_offset = std::max(result.max_abs_offset, t.offset.cwiseAbs().maxCoeff());
    reachable += t.reachable;
  }
  result.reachable_fraction = static_cast<double>(reachable) / config.trials;
  return result;
}

ExperimentReport perching_report(const PerchingResult& res, const PerchingConfig& cfg,
                                 std::uint64_t seed) {
  ExperimentReport r;
  r.name = "perching_mc";
  r.seed = seed;
  r.trial_csv = "trial,aim_u_mm,aim_v_mm,offset_u_mm,offset_v_mm,attached,reachable\n";
  r.long_csv = "series,x,y\n";
  for (std::size_t i = 0; i < res.trials.size(); ++i) {
    const auto& t = res.trials[i];
    r.trials.push_back({{"trial", i},
                        {"aim_mm", {1e3 * t.aim_error.x(), 1e3 * t.aim_error.y()}},
                        {"offset_mm", {1e3 * t.offset.x(), 1e3 * t.offset.y()}},
                        {"attached", t.attached},
                        {"reachable", t.reachable}});
    r.trial_csv += std::to_string(i) + "," + num(1e3 * t.aim_error.x()) + "," +
                   num(1e3 * t.aim_error.y()) + "," + num(1e3 * t.offset.x()) + "," +
                   num(1e3 * t.offset.y()) + "," + std::to_string(t.attached) + "," +
                   std::to_string(t.reachable) + "\n";
    r.long_csv += "perch_offset_mm," + num(1e3 * t.offset.x()) + "," + num(1e3 * t.offset.y()) + "\n";
  }
  r.summary = {{"trials", cfg.trials},
               {"sigma_mm", 1e3 * cfg.sigma},
               {"truncation_mm", 1e3 * cfg.truncation},
               {"max_abs_offset_mm", 1e3 * res.max_abs_offset},
               {"reachable_fraction", res.reachable_fraction}};
  r.reference = {{"max_abs_offset_mm", 100.0}, {"reachable_fraction_min", 0.9}};
  r.passed = res.max_abs_offset <= 0.1 && res.reachable_fraction >= 0.9;
  return r;
}

// --- drilling study -------------------------------------------------------

ParameterSet noiseless(const ParameterSet& params) {
  ParameterSet p = params;
  p.sensing.quantize = false;
  p.sensing.pointing_noise_sigma = 0.0;
  p.robot.gantry_backlash = 0.0;
  p.hole_noise.thrust_imbalance_sigma = 0.0;
  p.hole_noise.slide_jitter_sigma = 0.0;
  p.odometry.enabled = false;
  return p;
}

namespace {

HoleRecord drill_one(const ParameterSet& base, const DrillingConfig& cfg, const Vec2& target,
                     const Vec3& start_shift, bool cold, std::uint64_t seed) {
  HoleRecord rec;
  rec.target = target;
  rec.cold = cold;
  ParameterSet params = cfg.noise ? base : noiseless(base);
  if (cold) params.env.ambient_temperature = cfg.cold_temperature;
  std::mt19937_64 rng(seed);
  const WallFrame wall = WallFrame::from(params.env);

  for (int attempt = 1; attempt <= cfg.max_attempts; ++attempt) {
    rec.attempts = attempt;
    const double perch_sigma = cfg.noise ? cfg.perch_sigma : 0.0;
    const Vec2 aim = sample_aim_error(rng, perch_sigma, cfg.perch_truncation);
    Vec4 gains = Vec4::Ones();
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < kRotorCount; ++i) {
      gains[i] = std::max(0.5, 1.0 + params.hole_noise.thrust_imbalance_sigma * unit(rng));
    }
    Vec2 jitter(params.hole_noise.slide_jitter_sigma * unit(rng),
                params.hole_noise.slide_jitter_sigma * unit(rng));

    SimConfig sc;
    sc.start_position = start_shift + aim.x() * wall.u_axis + aim.y() * wall.v_axis;
    const Vec3 n = params.env.wall_normal.normalized();
    sc.start_heading = std::atan2(-n.y(), -n.x());
    sc.view_center = target;
    sc.thrust_gains = gains;
    Simulation sim(params, sc, rng());
    AgentConfig agent;
    const HoleRun run = run_hole_mission(sim, agent);
    if (run.outcome == AgentOutcome::Unreachable) continue;
    if (run.outcome != AgentOutcome::Drilled) return rec;

    const double feed_rpm = agent.feed_throttle * params.robot.rotor_speed_limit;
    const double per_rotor = params.robot.rotor_thrust_coeff * feed_rpm * feed_rpm;
    rec.breakdown.target = target;
    rec.breakdown.alignment = run.motor_uv - target;
    rec.breakdown.backlash = run.aligned_uv - run.motor_uv;
    rec.breakdown.slip = run.final_uv - run.aligned_uv;
    rec.breakdown.drift = imbalance_drift(gains, per_rotor, params.robot, params.hole_noise);
    rec.breakdown.jitter = jitter;
    rec.hole = hole_position(rec.breakdown);
    rec.slip = run.slip;
    rec.drilled = true;
    rec.excluded = run.slip > cfg.exclusion_slip;
    return rec;
  }
  return rec;
}

}  // namespace

DrillingResult run_drilling_study(const ParameterSet& params, const DrillingConfig& cfg,
                                  std::uint64_t seed, Exec exec) {
  require(cfg.grid >= 1, "grid must be positive");
  const ParameterSet base = cfg.noise ? params : noiseless(params);
  // Where a straight approach from the nominal start leaves the centred tool.
  const SimConfig nominal_cfg = approach_config(base, 1.5, Vec2::Zero());
  Simulation ref(base, nominal_cfg, seed);
  const Approach a = fly_in(ref, 0.4, 60.0);
  require(a.attached, "reference approach did not perch");
  const WallFrame wall = WallFrame::from(base.env);

  std::vector<std::pair<Vec2, bool>> jobs;
  const double half = 0.5 * (cfg.grid - 1);
  for (int row = 0; row < cfg.grid; ++row) {
    for (int col = 0; col < cfg.grid; ++col) {
      jobs.push_back({a.tool_uv + cfg.spacing * Vec2(col - half, half - row), false});
    }
  }
  if (cfg.cold_outlier) jobs.push_back({a.tool_uv, true});

  DrillingResult result;
  result.holes.resize(jobs.size());
  for_each_trial(static_cast<int>(jobs.size()), exec, [&](int i) {
    const Vec2 shift = jobs[i].first - a.tool_uv;
    const Vec3 start = nominal_cfg.start_position + shift.x() * wall.u_axis + shift.y() * wall.v_axis;
    HoleRecord rec = drill_one(params, cfg, jobs[i].first, start, jobs[i].second,
                               stream_seed(seed, i));
    rec.run_id = i;
    result.holes[i] = rec;
  });

  std::vector<Vec2> offsets;
  for (const auto& h : result.holes) {
    if (h.drilled && !h.excluded) offsets.push_back(h.hole - h.target);
  }
  result.inliers = static_cast<int>(offsets.size());
  result.stats = hole_statistics(offsets);
  return result;
}

ExperimentReport drilling_report(const DrillingResult& res, const DrillingConfig& cfg,
                                 std::uint64_t seed) {
  ExperimentReport r;
  r.name = "drilling";
  r.seed = seed;
  r.trial_csv = "run_id,target_x_mm,target_y_mm,hole_x_mm,hole_y_mm,offset_norm_mm,excluded\n";
  r.long_csv = "series,x,y\n";
  for (const auto& h : res.holes) {
    const Vec2 off = h.hole - h.target;
    r.trials.push_back({{"run_id", h.run_id},
                        {"target_mm", {1e3 * h.target.x(), 1e3 * h.target.y()}},
                        {"hole_mm", {1e3 * h.hole.x(), 1e3 * h.hole.y()}},
                        {"offset_mm", {1e3 * off.x(), 1e3 * off.y()}},
                        {"slip_mm", 1e3 * h.slip},
                        {"attempts", h.attempts},
                        {"drilled", h.drilled},
                        {"cold", h.cold},
                        {"excluded", h.excluded}});
    r.trial_csv += std::to_string(h.run_id) + "," + num(1e3 * h.target.x()) + "," +
                   num(1e3 * h.target.y()) + "," + num(1e3 * h.hole.x()) + "," +
                   num(1e3 * h.hole.y()) + "," + num(1e3 * off.norm()) + "," +
                   std::to_string(h.excluded || !h.drilled) + "\n";
    r.long_csv += std::string(h.excluded ? "hole_offset_excluded_mm," : "hole_offset_mm,") +
                  num(1e3 * off.x()) + "," + num(1e3 * off.y()) + "\n";
  }
  r.summary = {{"holes", res.holes.size()},
               {"inliers", res.inliers},
               {"mean_offset_mm", {1e3 * res.stats.mean.x(), 1e3 * res.stats.mean.y()}},
               {"accuracy_mm", 1e3 * res.stats.accuracy},
               {"precision_mm", 1e3 * res.stats.precision},
               {"noise", cfg.noise}};
  r.reference = {{"accuracy_mm", {7.0, 13.0}}, {"precision_mm_max", 8.0}};
  r.passed = res.inliers == cfg.grid * cfg.grid && res.stats.accuracy >= 0.007 &&
             res.stats.accuracy <= 0.013 && res.stats.precision <= 0.008;
  return r;
}

// --- detachment replay ----------------------------------------------------

DetachmentReplay run_detachment_replay(const ParameterSet& params, std::uint64_t seed,
                                       double horizon_after_start) {
  DetachmentReplay out;
  SimConfig sc = approach_config(params, 1.5, Vec2::Zero());
  Simulation sim(params, sc, seed);
  AgentConfig agent;
  // Bring the robot to manipulation with the slide home, then unwind.
  const Approach a = fly_in(sim, agent.approach_speed, 60.0);
  require(a.attached, "replay approach did not perch");
  sim.submit(RampDownRotors{});
  while (!(sim.view().ramped_down && sim.view().gantry_centered) && !sim.failed()) sim.tick();
  require(sim.submit(SetMode{Mode::Rotation}).accepted, "rotation refused");
  sim.submit(RotationThrottle{agent.rotation_throttle});
  while (!(std::abs(sim.state().hinge_theta - 0.5 * kPi) < 1e-9 &&
           std::abs(sim.state().hinge_theta_rate) < 1e-3) &&
         !sim.failed()) {
    sim.tick();
  }
  require(sim.submit(SetMode{Mode::Manipulation}).accepted, "manipulation refused");
  require(sim.submit(SetMode{Mode::Detachment}).accepted, "detachment refused");

  const double t0 = sim.state().time;
  const double end = t0 + horizon_after_start;
  double next_sample = t0;
  std::vector<std::pair<double, double>> fine;  // time, wall distance
  while (sim.state().time < end - 1e-9 && !sim.failed()) {
    sim.tick();
    const SimState& s = sim.state();
    const double dist = sim.wall_clearance();
    fine.push_back({s.time - t0, dist});
    if (s.time >= next_sample - 1e-9) {
      const double pressure = 0.5e-3 * (s.cup_pressures[0] + s.cup_pressures[1]);
      out.trace.push_back({s.time - t0, s.rotor_speeds.mean(), pressure, dist});
      next_sample += 0.1;
    }
  }
  for (auto e : sim.detachment().events()) {
    e.time -= t0;
    out.events.push_back(e);
  }

  auto when = [&](const std::string& name) {
    for (const auto& e : out.events) {
      if (e.name == name) return e.time;
    }
    return -1.0;
  };
  const double ramp = when("hover_thrust");
  const double pumps = when("pumps_off");
  const double valves = when("valves_open");
  out.separation_time = when("separated");
  out.separated = out.separation_time >= 0.0;
  out.ordered = ramp >= 0.0 && pumps > ramp && valves > pumps && out.separation_time > valves;
  if (out.separated) {
    bool mono = true;
    double prev = -INFINITY;
    bool covered = false;
    for (const auto& [t, d] : fine) {
      if (t < out.separation_time - 1e-12) continue;
      if (t > out.separation_time + 0.5 + 1e-12) {
        covered = true;
        break;
      }
      if (!(d > prev)) mono = false;
      prev = d;
    }
    out.monotone_after_separation = mono && covered;
  }
  return out;
}

ExperimentReport detachment_report(const DetachmentReplay& rep, std::uint64_t seed) {
  ExperimentReport r;
  r.name = "detachment";
  r.seed = seed;
  r.trial_csv = "time_s,mean_rpm,pressure_kpa,wall_distance_m\n";
  r.long_csv = "series,x,y\n";
  for (const auto& row : rep.trace) {
    r.trial_csv += num(row[0], 3) + "," + num(row[1], 3) + "," + num(row[2], 4) + "," +
                   num(row[3], 6) + "\n";
    r.long_csv += "thrust_rpm," + num(row[0], 3) + "," + num(row[1], 3) + "\n";
    r.long_csv += "pressure_kpa," + num(row[0], 3) + "," + num(row[2], 4) + "\n";
    r.long_csv += "wall_distance_m," + num(row[0], 3) + "," + num(row[3], 6) + "\n";
  }
  for (const auto& e : rep.events) r.trials.push_back({{"time_s", e.time}, {"event", e.name}});
  r.summary = {{"ordered", rep.ordered},
               {"separated", rep.separated},
               {"separation_time_s", rep.separation_time},
               {"monotone_after_separation", rep.monotone_after_separation}};
  r.reference = {{"order", {"hover_thrust", "pumps_off", "valves_open", "separated"}}};
  r.passed = rep.ordered && rep.monotone_after_separation;
  return r;
}

std::string detachment_golden(const DetachmentReplay& rep) {
  std::string out;
  for (const auto& e : rep.events) out += "event " + num(e.time, 3) + " " + e.name + "\n";
  for (const auto& row : rep.trace) {
    out += "trace " + num(row[0], 1) + " " + num(row[1], 1) + " " + num(row[2], 2) + " " +
           num(row[3], 4) + "\n";
  }
  return out;
}

// --- command fuzzing ------------------------------------------------------

namespace {

// Lock rows, written out independently of enforce_locks.
constexpr bool kTable[5][3] = {
    {true, true, true},    // flight
    {true, true, true},    // perching
    {false, false, true},  // rotation
    {true, false, false},  // manipulation
    {false, false, false}, // detachment (sequencer-owned)
};

OperatorCommand guided(const Simulation& sim) {
  const MissionView v = sim.view();
  const double heading = sim.config().start_heading;
  switch (sim.mode()) {
    case Mode::Flight:
      if (!v.pumps_on) return Pumps{true};
      if (v.contact) return SetMode{Mode::Perching};
      return SetFlightRef{Vec3(0.4, 0.0, 0.0), heading};
    case Mode::Perching:
      if (!v.attached) return SetFlightRef{Vec3(0.4, 0.0, 0.0), heading};
      if (!v.ramp_down_started) return RampDownRotors{};
      return SetMode{Mode::Rotation};
    case Mode::Rotation:
      if (std::abs(v.theta - 0.5 * kPi) < deg2rad(1.0)) return SetMode{Mode::Manipulation};
      return RotationThrottle{0.8};
    case Mode::Manipulation:
      if (v.tool_on && v.depth_goal_reached) return ToolPower{false};
      if (v.tool_on) return FeedThrottle{0.95, FeedDirection::Advance};
      if (v.depth_goal_reached) return SetMode{Mode::Detachment};
      return ToolPower{true};
    case Mode::Detachment:
      return SetMode{Mode::Flight};
  }
  return Pumps{true};
}

OperatorCommand random_command(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, 8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::bernoulli_distribution coin(0.5);
  switch (pick(rng)) {
    case 0: return SetFlightRef{Vec3(1.5 * u(rng), 1.5 * u(rng), 0.5 * u(rng)), kPi * u(rng)};
    case 1: return SetMode{static_cast<Mode>(std::uniform_int_distribution<int>(0, 4)(rng))};
    case 2: return Pumps{coin(rng)};
    case 3: return Valves{coin(rng)};
    case 4: return RotationThrottle{0.75 + 0.5 * u(rng)};
    case 5:
      return FeedThrottle{0.75 + 0.5 * u(rng),
                          coin(rng) ? FeedDirection::Advance : FeedDirection::Retract};
    case 6: return GantryTarget{Vec2(0.15 * u(rng), 0.1 * u(rng))};
    case 7: return ToolPower{coin(rng)};
    default: return RampDownRotors{};
  }
}

FuzzResult fuzz_stream(const ParameterSet& params, long long commands, int max_ticks,
                       std::uint64_t seed) {
  FuzzResult res;
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution use_guided(0.6);
  std::uniform_int_distribution<int> ticks(0, max_ticks);
  auto fresh = [&] { return std::make_unique<Simulation>(params, SimConfig{}, rng()); };
  auto sim = fresh();
  auto note = [&](long long& counter, const std::string& what) {
    ++counter;
    if (res.first_violation.empty()) res.first_violation = what;
  };
  auto check = [&] {
    const Mode m = sim->mode();
    const int mi = static_cast<int>(m);
    ++res.mode_visits[mi];
    if (sim->tool_on()) {
      ++res.tool_on_ticks[mi];
      if (m != Mode::Manipulation || sim->hinge() != HingeLockState::RotationLocked) {
        note(res.safety_violations, std::string("tool on in ") + to_string(m) + " with hinge " +
                                        to_string(sim->hinge()));
      }
    }
    const LockSet locks = enforce_locks(m);
    const LockSet table{kTable[mi][0], kTable[mi][1], kTable[mi][2]};
    if (!(locks == table) || !hinge_respects(locks, sim->hinge())) {
      note(res.lock_violations, std::string("lock mismatch in ") + to_string(m));
    }
  };
  for (long long c = 0; c < commands; ++c) {
    if (sim->failed() || sim->state().time > 400.0) sim = fresh();
    const OperatorCommand cmd = use_guided(rng) ? guided(*sim) : random_command(rng);
    const std::size_t trace_len = sim->mode_trace().size();
    res.accepted += sim->submit(cmd).accepted;
    ++res.commands;
    if (sim->mode_trace().size() != trace_len && !is_mode_trace_prefix(sim->mode_trace())) {
      note(res.trace_violations, "mode trace left the mission language");
    }
    check();
    const int n = ticks(rng);
    for (int k = 0; k < n && !sim->failed(); ++k) {
      sim->tick();
      ++res.ticks;
      check();
    }
  }
  return res;
}

}  // namespace

FuzzResult run_command_fuzz(const ParameterSet& params, const FuzzConfig& config,
                            std::uint64_t seed, Exec exec) {
  require(config.streams >= 1 && config.commands >= 0, "bad fuzz configuration");
  std::vector<FuzzResult> parts(config.streams);
  for_each_trial(config.streams, exec, [&](int i) {
    const long long share = config.commands / config.streams +
                            (i < config.commands % config.streams ? 1 : 0);
    parts[i] = fuzz_stream(params, share, config.max_ticks_between, stream_seed(seed, i));
  });
  FuzzResult total;
  for (const auto& p : parts) {
    total.commands += p.commands;
    total.accepted += p.accepted;
    total.ticks += p.ticks;
    total.safety_violations += p.safety_violations;
    total.lock_violations += p.lock_violations;
    total.trace_violations += p.trace_violations;
    for (int m = 0; m < 5; ++m) {
      total.mode_visits[m] += p.mode_visits[m];
      total.tool_on_ticks[m] += p.tool_on_ticks[m];
    }
    if (total.first_violation.empty()) total.first_violation = p.first_violation;
  }
  return total;
}

ExperimentReport fuzz_report(const FuzzResult& res, std::uint64_t seed) {
  ExperimentReport r;
  r.name = "command_fuzz";
  r.seed = seed;
  r.trial_csv = "mode,visits,tool_on_ticks\n";
  r.long_csv = "series,x,y\n";
  for (int m = 0; m < 5; ++m) {
    const char* name = to_string(static_cast<Mode>(m));
    r.trials.push_back({{"mode", name},
                        {"visits", res.mode_visits[m]},
                        {"tool_on_ticks", res.tool_on_ticks[m]}});
    r.trial_csv += std::string(name) + "," + std::to_string(res.mode_visits[m]) + "," +
                   std::to_string(res.tool_on_ticks[m]) + "\n";
    r.long_csv += "visits," + std::to_string(m) + "," + std::to_string(res.mode_visits[m]) + "\n";
  }
  r.summary = {{"commands", res.commands},
               {"accepted", res.accepted},
               {"ticks", res.ticks},
               {"safety_violations", res.safety_violations},
               {"lock_violations", res.lock_violations},
               {"trace_violations", res.trace_violations},
               {"first_violation", res.first_violation}};
  r.reference = {{"violations", 0}};
  r.passed = res.safety_violations == 0 && res.lock_violations == 0 && res.trace_violations == 0;
  return r;
}

}  // namespace perch

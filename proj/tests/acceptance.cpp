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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "perchsim/experiments.hpp"

using namespace perch;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(const char* name, const std::function<Verdict()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %-22s %s [%.2f s]\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs);
  std::fflush(stdout);
  failures += !v.pass;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

bool within(double v, double centre, double tol) { return std::abs(v - centre) <= tol; }

}  // namespace

int main() {
  const ParameterSet ps = ParameterSet::defaults();

  criterion("reaction_force", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    const ForcePowerRow max = measure_feed(ps, ps.robot.rotor_speed_limit);
    const ForcePowerRow mid = measure_feed(ps, 3000.0);
    const double secs = seconds_since(t0);
    const bool ok = within(max.feed_force, 150.0, 5.0) && within(mid.gross_feed, 110.0, 4.0) &&
                    secs < 10.0;
    return Verdict{ok, fmt("max rpm %.2f N (150+-5), 3000 rpm %.2f N (110+-4), %.2f s (<10)",
                           max.feed_force, mid.gross_feed, secs)};
  });

  criterion("power", [&] {
    const double hover = hover_power(ps);
    const double manip = measure_feed(ps, 3000.0).power;
    const bool ok = within(hover, 2000.0, 200.0) && within(manip, 2000.0, 200.0) &&
                    std::abs(hover - manip) <= 0.1 * std::max(hover, manip);
    return Verdict{ok, fmt("hover %.1f W, 3000 rpm %.1f W (2000+-10%%, within 10%% of each other)",
                           hover, manip)};
  });

  criterion("endurance", [&] {
    const double t = run_endurance(ps, EnduranceInput{1.0, 139.0});
    return Verdict{within(t, 250.0, 25.0), fmt("1 kg at 139 Wh/kg -> %.1f s (250+-10%%)", t)};
  });

  criterion("perching_mc", [&] {
    const PerchingConfig cfg;
    const auto a = run_perching_mc(ps, cfg, 1, Exec::Parallel);
    const auto b = run_perching_mc(ps, cfg, 1, Exec::Serial);
    const bool same = perching_report(a, cfg, 1).trial_csv == perching_report(b, cfg, 1).trial_csv;
    const bool ok = static_cast<int>(a.trials.size()) == 30 && a.max_abs_offset <= 0.100 &&
                    a.reachable_fraction >= 0.9 && same;
    return Verdict{ok, fmt("n=%zu sigma=%.0f mm, max |offset| %.1f mm (<=100), reachable %.0f%% "
                           "(>=90), deterministic %s",
                           a.trials.size(), 1e3 * cfg.sigma, 1e3 * a.max_abs_offset,
                           100.0 * a.reachable_fraction, same ? "yes" : "no")};
  });

  criterion("drilling", [&] {
    const DrillingConfig cfg;
    const DrillingResult r = run_drilling_study(ps, cfg, 1, Exec::Parallel);
    DrillingConfig quiet = cfg;
    quiet.noise = false;
    const DrillingResult q = run_drilling_study(ps, quiet, 1, Exec::Parallel);
    const double offset = ps.sensing.laser_offset.norm();
    const bool ok = r.inliers == 9 && r.stats.accuracy >= 0.007 && r.stats.accuracy <= 0.013 &&
                    r.stats.precision <= 0.008 && q.inliers == 9 &&
                    std::abs(q.stats.accuracy - offset) <= 1e-12;
    return Verdict{ok, fmt("9 holes: accuracy %.2f mm [7,13], precision %.2f mm (<=8), inliers %d; "
                           "noise off: accuracy %.6f mm vs |laser_offset| %.6f mm",
                           1e3 * r.stats.accuracy, 1e3 * r.stats.precision, r.inliers,
                           1e3 * q.stats.accuracy, 1e3 * offset)};
  });

  criterion("detachment_order", [&] {
    const DetachmentReplay r = run_detachment_replay(ps, 1);
    auto at = [&](const std::string& name) {
      for (const auto& e : r.events) {
        if (e.name == name) return e.time;
      }
      return -1.0;
    };
    const double ramp = at("hover_thrust"), pumps = at("pumps_off"), valves = at("valves_open"),
                 sep = at("separated");
    const bool ok = ramp >= 0.0 && ramp < pumps && pumps < valves && valves < sep && r.ordered &&
                    r.monotone_after_separation;
    return Verdict{ok, fmt("thrust %.2f < pumps off %.2f < valves %.2f < separation %.2f s; "
                           "wall distance increasing for 0.5 s after: %s",
                           ramp, pumps, valves, sep, r.monotone_after_separation ? "yes" : "no")};
  });

  criterion("fsm_safety", [&] {
    const auto t0 = std::chrono::steady_clock::now();
    FuzzConfig cfg;
    const FuzzResult r = run_command_fuzz(ps, cfg, 1, Exec::Parallel);
    const double secs = seconds_since(t0);
    const bool ok = r.commands == 1'000'000 && r.safety_violations == 0 && r.lock_violations == 0 &&
                    r.trace_violations == 0 && r.tool_on_ticks[static_cast<int>(Mode::Manipulation)] > 0 &&
                    secs < 60.0;
    return Verdict{ok, fmt("%lld commands, drill-on violations %lld, lock-row mismatches %lld, "
                           "trace violations %lld, %.1f s (<60)",
                           r.commands, r.safety_violations, r.lock_violations, r.trace_violations,
                           secs)};
  });

  criterion("statics_oracle", [&] {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> pressure(0.2 * ps.robot.vacuum_max, ps.robot.vacuum_max);
    std::uniform_real_distribution<double> mu_d(0.05, 1.5), unit(0.0, 1.0), ang(-kPi, kPi);
    const double area = kPi * std::pow(0.5 * ps.robot.cup_diameter, 2);
    int checked = 0, bad = 0;
    while (checked < 1000) {
      CupPair cups{};
      cups[0].pressure_deficit = pressure(rng);
      cups[1].pressure_deficit = pressure(rng);
      for (auto& c : cups) c.attached = c.contact = true;
      const double mu = mu_d(rng);
      const double hold = (cups[0].pressure_deficit + cups[1].pressure_deficit) * area;
      const double fx = hold * (2.0 * unit(rng) - 1.2);
      const double normal = hold + fx;
      if (normal <= 1e-6) continue;
      const double cone = mu * normal;
      const double phi = ang(rng);
      auto load = [&](double s) { return Vec3(fx, s * std::cos(phi), s * std::sin(phi)); };
      const bool below = !holding_wrench(cups, mu, load(cone * (1 - 1e-9)), ps.robot).slips;
      const bool above = holding_wrench(cups, mu, load(cone * (1 + 1e-9)), ps.robot).slips;
      bad += !(below && above);
      ++checked;
    }
    return Verdict{bad == 0, fmt("%d random cases, %d disagree with mu*(sum p*A + Fx) at 1e-9", checked, bad)};
  });

  criterion("numerics", [&] {
    const DynamicsModel m = DynamicsModel::from(ps);
    const SimState s0 = hover_state(ps, Vec3(1.0, 0.0, 2.0), kPi);
    const double w = s0.rotor_speeds[0];
    const Vec4 cmd(w + 40.0, w + 10.0, w - 30.0, w - 20.0);
    auto fly = [&](double dt) {
      SimState s = s0;
      for (int i = 0, n = static_cast<int>(std::lround(1.0 / dt)); i < n; ++i) {
        s = step(s, cmd, ConstraintRegime{}, dt, m);
      }
      return s.body_pose.position;
    };
    const double dev = (fly(0.002) - fly(0.001)).norm();
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
      SimState s;
      s.body_pose.position = Vec3(3 * u(rng), 3 * u(rng), 3 * u(rng));
      s.body_pose.orientation = Quat(u(rng), u(rng), u(rng), u(rng)).normalized();
      s.hinge_theta = 0.25 * kPi * (1.0 + u(rng));
      s.hinge_slide = 0.05 * (1.0 + u(rng));
      s.gantry_pos = Vec2(0.1 * u(rng), 0.07 * u(rng));
      const Frame a = frame_from_id(i % 4), b = frame_from_id((i / 4) % 4);
      const Vec3 x(u(rng), u(rng), u(rng));
      const Vec3 back = frame_transform(s, b, a, frame_transform(s, a, b, x, ps.robot), ps.robot);
      worst = std::max(worst, (back - x).norm());
    }
    return Verdict{dev < 1e-3 && worst < 1e-9,
                   fmt("dt-halving deviation %.3e m (<1e-3) over 1 s; frame round trip %.3e m (<1e-9)",
                       dev, worst)};
  });

  std::printf("%s: %d criteria failed\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}

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

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "perchsim/agent.hpp"

namespace perch {

/// Kernels with a parallel variant take this switch; both variants produce
/// bit-identical results.
enum class Exec { Serial, Parallel };

struct ExperimentReport {
  std::string name;
  std::uint64_t seed = 0;
  nlohmann::json trials = nlohmann::json::array();
  nlohmann::json summary = nlohmann::json::object();
  nlohmann::json reference = nlohmann::json::object();
  std::string trial_csv;  // per-trial table with header
  std::string long_csv;   // series,x,y
  bool passed = true;
};

/// Writes <dir>/<name>/report.json, trials.csv and plot.csv.
void write_report(const std::filesystem::path& dir, const ExperimentReport& report);

/// Independent stream seed for trial `index` of a run seeded with `seed`.
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t index);

// --- statistics -----------------------------------------------------------

struct HoleStats {
  Vec2 mean = Vec2::Zero();
  double accuracy = 0.0;   // norm of the mean offset
  double precision = 0.0;  // largest distance of an offset from the mean
};

HoleStats hole_statistics(const std::vector<Vec2>& offsets);

// --- force / power --------------------------------------------------------

struct ForcePowerRow {
  double rpm = 0.0;
  double gross_feed = 0.0;  // rotor force along the feed axis, before friction
  double feed_force = 0.0;  // steady force on the wall
  double power = 0.0;       // W
};

ForcePowerRow measure_feed(const ParameterSet& params, double rpm, double settle_time = 3.0);
std::vector<ForcePowerRow> run_force_power_sweep(const ParameterSet& params,
                                                 const std::vector<double>& rpms);
double hover_power(const ParameterSet& params);
ExperimentReport force_power_report(const ParameterSet& params);

// --- endurance ------------------------------------------------------------

struct EnduranceInput {
  double battery_mass = 1.0;        // kg
  double specific_energy = 139.0;   // Wh/kg
  bool added_mass_correction = false;
  double baseline_battery_mass = 1.0;  // kg already included in the robot mass
};

/// Seconds of hover-equivalent operation.
double run_endurance(const ParameterSet& params, const EnduranceInput& in);
/// Battery sweep from 0.5 to 3 kg, with and without the added-mass correction.
ExperimentReport endurance_report(const ParameterSet& params, const EnduranceInput& in);

// --- perching Monte Carlo -------------------------------------------------

struct PerchingConfig {
  int trials = 30;
  double sigma = 0.04;       // m, per wall axis
  double truncation = 0.10;  // m
  double standoff = 1.5;     // m from the wall at the start
};

struct PerchTrial {
  Vec2 aim_error = Vec2::Zero();
  Vec2 offset = Vec2::Zero();  // attachment origin vs nominal perch, wall uv
  bool attached = false;
  bool reachable = false;
};

struct PerchingResult {
  std::vector<PerchTrial> trials;
  Vec2 nominal = Vec2::Zero();
  double max_abs_offset = 0.0;
  double reachable_fraction = 0.0;
};

/// Truncated zero-mean normal pair drawn by rejection.
Vec2 sample_aim_error(std::mt19937_64& rng, double sigma, double truncation);

/// Whether the desired tool point still lies in the gantry window after the
/// robot perched `offset` away from its nominal spot.
bool tool_point_reachable(const Vec2& offset, const RobotParams& robot);

PerchingResult run_perching_mc(const ParameterSet& params, const PerchingConfig& config,
                               std::uint64_t seed, Exec exec = Exec::Parallel);
ExperimentReport perching_report(const PerchingResult& result, const PerchingConfig& config,
                                 std::uint64_t seed);

// --- drilling study -------------------------------------------------------

struct DrillingConfig {
  int grid = 3;                  // grid x grid holes
  double spacing = 0.04;         // m
  double perch_sigma = 0.02;     // m, aim scatter per approach
  double perch_truncation = 0.10;
  bool cold_outlier = true;      // one extra run at freezing temperature
  double cold_temperature = 0.0;
  double exclusion_slip = 0.005; // m of attachment slip that voids a hole
  int max_attempts = 4;          // perches per hole before giving up
  bool noise = true;             // false: every error source off
};

struct HoleRecord {
  int run_id = 0;
  Vec2 target = Vec2::Zero();
  Vec2 hole = Vec2::Zero();
  HoleErrorBreakdown breakdown;
  double slip = 0.0;
  int attempts = 0;
  bool drilled = false;
  bool excluded = false;
  bool cold = false;
};

struct DrillingResult {
  std::vector<HoleRecord> holes;
  HoleStats stats;  // over holes that were drilled and not excluded
  int inliers = 0;
};

/// Parameters with every hole error source switched off.
ParameterSet noiseless(const ParameterSet& params);

DrillingResult run_drilling_study(const ParameterSet& params, const DrillingConfig& config,
                                  std::uint64_t seed, Exec exec = Exec::Parallel);
ExperimentReport drilling_report(const DrillingResult& result, const DrillingConfig& config,
                                 std::uint64_t seed);

// --- detachment replay ----------------------------------------------------

struct DetachmentReplay {
  std::vector<DetachEvent> events;        // sequencer log
  std::vector<std::array<double, 4>> trace;  // time, mean rpm, pressure kPa, wall distance
  double separation_time = -1.0;
  bool ordered = false;
  bool separated = false;
  bool monotone_after_separation = false;
};

DetachmentReplay run_detachment_replay(const ParameterSet& params, std::uint64_t seed,
                                       double horizon_after_start = 30.0);
ExperimentReport detachment_report(const DetachmentReplay& replay, std::uint64_t seed);
/// Golden text: one `time name` line per event, then the trace every 0.1 s.
std::string detachment_golden(const DetachmentReplay& replay);

// --- command fuzzing ------------------------------------------------------

struct FuzzConfig {
  long long commands = 1'000'000;
  int streams = 200;
  int max_ticks_between = 40;
};

struct FuzzResult {
  long long commands = 0;
  long long accepted = 0;
  long long ticks = 0;
  long long safety_violations = 0;
  long long lock_violations = 0;
  long long trace_violations = 0;
  std::array<long long, 5> mode_visits{};
  std::array<long long, 5> tool_on_ticks{};
  std::string first_violation;
};

FuzzResult run_command_fuzz(const ParameterSet& params, const FuzzConfig& config,
                            std::uint64_t seed, Exec exec = Exec::Parallel);
ExperimentReport fuzz_report(const FuzzResult& result, std::uint64_t seed);

}  // namespace perch

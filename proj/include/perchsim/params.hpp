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

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>

#include "perchsim/types.hpp"

namespace perch {

/// Airframe, propulsion, attachment and hinge constants. Field-level
/// provenance lives in ParameterSet::provenance.
struct RobotParams {
  // mass and size
  double mass_base = 6.6;
  double mass_positioning = 2.2;
  double mass_tool = 2.3;
  double tether_linear_density = 0.2;
  double height = 0.77;
  double width = 0.73;
  double length = 1.22;
  double prop_diameter = 0.48;

  Vec3 inertia_diag{0.45, 0.65, 0.95};  // kg m^2 about the flight COM

  // Rotors. k_f and k_p are overwritten by calibrate_rotor_coeffs at load.
  double rotor_thrust_coeff = 110.0 / (4.0 * 3000.0 * 3000.0);  // N/rpm^2
  double rotor_drag_ratio = 0.016;                               // k_tau / k_f, m
  double rotor_power_coeff = 1.833e-8;                           // W/rpm^3
  double avionics_power = 50.0;                                  // W
  double rotor_speed_limit = 3600.0;                             // rpm
  double rotor_time_constant = 0.2;                              // s
  double rotor_arm_x = 0.26;
  double rotor_arm_y = 0.26;
  double rotor_height = 0.08;

  // Suction cups (Piab B75XP)
  double cup_diameter = 0.075;
  double cup_spacing = 0.30;
  double vacuum_max = 80000.0;  // Pa below ambient
  double pump_time_constant = 1.5;
  double valve_release_time_constant = 0.5;
  double attach_fraction = 0.3;
  double contact_gap = 0.002;
  double contact_speed = 0.5;
  double mu_warm = 0.5;
  double mu_warm_temperature = 20.0;
  double mu_cold = 0.12;
  double mu_cold_temperature = 0.0;
  double slip_rate_coeff = 2e-5;  // m/(N s) of excess shear
  double cup_release_speed = 0.05; // m/s, spring-back of the cup lips on release

  // Hinge and slide
  double slide_friction_force = 10.0;
  double slide_travel = 0.10;
  Vec3 hinge_in_body{0.03, 0.0, -0.05};
  Vec3 hinge_in_attachment{-0.48, 0.0, 0.0};
  double engage_tolerance_theta = deg2rad(2.0);
  double engage_tolerance_slide = 0.002;

  // Tool positioning
  Vec3 tooltip_offset{0.0, 0.0, 0.40};
  Vec2 gantry_workspace{0.210, 0.150};  // extent along x_B, y_B
  Vec2 gantry_center{0.0, 0.0};
  double gantry_speed_limit = 0.05;
  double gantry_backlash = 0.002;
  Vec3 com_offset_flight{0.0, 0.0, 0.0};

  double total_static_mass() const { return mass_base + mass_positioning + mass_tool; }
  double cup_area() const { return kPi * 0.25 * cup_diameter * cup_diameter; }
  // Gantry position that puts the tool at the quadrotor's back (flight COM).
  Vec2 gantry_flight_position() const {
    return gantry_center - Vec2(0.5 * gantry_workspace.x(), 0.0);
  }
};

struct Material {
  double min_feed_force = 80.0;   // N
  double drill_rate_coeff = 2e-5; // m/(N s)
};

struct Environment {
  double gravity = 9.81;
  Vec3 wall_point{0.0, 0.0, 0.0};
  Vec3 wall_normal{1.0, 0.0, 0.0};  // unit, pointing out of the wall into free space
  Material material{};
  double ambient_temperature = 20.0;
  Vec3 tether_attach_point{-0.2, 0.0, 0.0};  // in F_B
  double tether_deployed_length = 0.0;
};

enum class ToolKind { HammerDrill, ImpactWrench };

struct ToolSpec {
  ToolKind kind = ToolKind::HammerDrill;
  double mass = 2.3;
  double min_feed_force = 80.0;
  double drill_rate_coeff = 2e-5;
  double max_depth = 0.06;
};

ToolSpec hammer_drill();
ToolSpec impact_wrench();

/// Laser-cross camera model. Image axes: u to the right, v up, as seen by the
/// operator looking at the wall.
struct SensingModel {
  Vec2 laser_offset{-0.0065, -0.0075};
  double pixel_pitch = 0.004;
  Eigen::Vector2i camera_resolution{160, 120};
  double pointing_noise_sigma = 0.0;
  bool quantize = true;
};

/// Error sources contributing to the final hole position.
struct HoleNoise {
  double thrust_imbalance_sigma = 0.02;  // relative per-rotor thrust gain error
  double imbalance_drift_gain = 5e-4;    // m of tooltip drift per N m of imbalance moment
  double slide_jitter_sigma = 0.0015;    // m, per axis
};

struct ControllerGains {
  double velocity_p = 1.6;
  double velocity_d = 0.05;
  double attitude_p = 2.5;
  double attitude_d = 0.01;
  double rate_p = 8.0;
  double rate_d = 0.3;
  double yaw_p = 1.5;
  double max_tilt = deg2rad(25.0);
  double max_velocity = 2.0;
};

struct OdometryNoise {
  bool enabled = false;
  double position_sigma = 0.02;
  double velocity_sigma = 0.05;
  double bias_walk_sigma = 0.002;  // m/s per sqrt(s)
};

/// Timing and throttle constants of the operator procedures.
struct ProcedureParams {
  double ramp_down_time = 3.0;
  double ramped_down_rpm = 50.0;
  double retract_throttle = 0.35;
  double rotate_back_throttle = 0.45;
  double hover_ramp_time = 3.0;
  double lean_away_speed = 0.3;
  double pumps_off_delay = 2.0;
  double valves_open_delay = 2.0;
  double detach_clearance = 0.30;
  double depth_goal = 0.02;
};

/// Everything the simulator reads, plus a provenance tag per named entry.
struct ParameterSet {
  RobotParams robot;
  Environment env;
  ToolSpec tool = hammer_drill();
  SensingModel sensing;
  HoleNoise hole_noise;
  ControllerGains gains;
  OdometryNoise odometry;
  ProcedureParams procedure;
  std::map<std::string, std::string, std::less<>> provenance;

  static ParameterSet defaults();
  // Throws ContractViolation when an invariant does not hold.
  void validate() const;
};

using ParamRef = std::variant<double*, Vec2*, Vec3*, bool*>;

/// Calls visit(name, ref) for every file-addressable parameter.
void for_each_param(ParameterSet& params,
                    const std::function<void(std::string_view, ParamRef)>& visit);

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Text format: one `name = value ; provenance` per line, `#` comments.
// Vectors are comma separated. Unknown keys are a ParseError.
ParameterSet parse_params(std::string_view text);
ParameterSet load_params(const std::filesystem::path& path);
std::string format_params(const ParameterSet& params);

double total_mass(const RobotParams& params, double tether_deployed_length);

/// Cup friction coefficient, piecewise linear between the cold and warm anchors.
double cup_friction(const RobotParams& params, double temperature_c);

}  // namespace perch

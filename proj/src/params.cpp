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

#include "perchsim/params.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "perchsim/rotor.hpp"

namespace perch {

ToolSpec hammer_drill() { return ToolSpec{}; }

ToolSpec impact_wrench() {
  ToolSpec spec;
  spec.kind = ToolKind::ImpactWrench;
  spec.mass = 2.3;
  spec.min_feed_force = 40.0;
  spec.drill_rate_coeff = 1e-4;
  spec.max_depth = 0.05;
  return spec;
}

namespace {

struct Tagged {
  const char* name;
  const char* provenance;
};

// Default provenance per parameter name.
constexpr Tagged kProvenance[] = {
    {"robot.mass_base", "measured"},
    {"robot.mass_positioning", "measured"},
    {"robot.mass_tool", "measured"},
    {"robot.tether_linear_density", "measured"},
    {"robot.height", "measured"},
    {"robot.width", "measured"},
    {"robot.length", "measured"},
    {"robot.prop_diameter", "measured"},
    {"robot.inertia_diag", "assumed"},
    {"robot.rotor_thrust_coeff", "derived: 110 N at 3000 rpm on four rotors"},
    {"robot.rotor_drag_ratio", "assumed"},
    {"robot.rotor_power_coeff", "derived: 2 kW at hover"},
    {"robot.avionics_power", "assumed"},
    {"robot.rotor_speed_limit", "assumed"},
    {"robot.rotor_time_constant", "assumed"},
    {"robot.rotor_arm_x", "assumed"},
    {"robot.rotor_arm_y", "assumed"},
    {"robot.rotor_height", "assumed"},
    {"robot.cup_diameter", "datasheet (Piab B75XP)"},
    {"robot.cup_spacing", "assumed"},
    {"robot.vacuum_max", "assumed"},
    {"robot.pump_time_constant", "assumed"},
    {"robot.valve_release_time_constant", "assumed"},
    {"robot.attach_fraction", "assumed"},
    {"robot.contact_gap", "assumed"},
    {"robot.contact_speed", "assumed"},
    {"robot.mu_warm", "assumed"},
    {"robot.mu_warm_temperature", "assumed"},
    {"robot.mu_cold", "assumed"},
    {"robot.mu_cold_temperature", "assumed"},
    {"robot.slip_rate_coeff", "assumed"},
    {"robot.cup_release_speed", "assumed"},
    {"robot.slide_friction_force", "assumed"},
    {"robot.slide_travel", "assumed"},
    {"robot.hinge_in_body", "assumed"},
    {"robot.hinge_in_attachment", "assumed"},
    {"robot.engage_tolerance_theta", "assumed"},
    {"robot.engage_tolerance_slide", "assumed"},
    {"robot.tooltip_offset", "assumed"},
    {"robot.gantry_workspace", "150 x 210 mm window; axis assignment assumed"},
    {"robot.gantry_center", "assumed"},
    {"robot.gantry_speed_limit", "assumed"},
    {"robot.gantry_backlash", "assumed"},
    {"robot.com_offset_flight", "assumed"},
    {"env.gravity", "standard"},
    {"env.wall_point", "assumed"},
    {"env.wall_normal", "assumed"},
    {"env.material.min_feed_force", "80 N feed force for concrete"},
    {"env.material.drill_rate_coeff", "assumed"},
    {"env.ambient_temperature", "assumed"},
    {"env.tether_attach_point", "assumed"},
    {"env.tether_deployed_length", "assumed"},
    {"tool.mass", "measured"},
    {"tool.min_feed_force", "80 N feed force for concrete"},
    {"tool.drill_rate_coeff", "assumed"},
    {"tool.max_depth", "assumed"},
    {"sensing.laser_offset", "fitted: mean hole offset ~9.94 mm"},
    {"sensing.pixel_pitch", "measured (4 mm per pixel)"},
    {"sensing.camera_resolution", "assumed"},
    {"sensing.pointing_noise_sigma", "assumed"},
    {"sensing.quantize", "measured"},
    {"hole_noise.thrust_imbalance_sigma", "fitted"},
    {"hole_noise.imbalance_drift_gain", "fitted"},
    {"hole_noise.slide_jitter_sigma", "fitted"},
    {"gains.velocity_p", "tuned"},
    {"gains.velocity_d", "tuned"},
    {"gains.attitude_p", "tuned"},
    {"gains.attitude_d", "tuned"},
    {"gains.rate_p", "tuned"},
    {"gains.rate_d", "tuned"},
    {"gains.yaw_p", "tuned"},
    {"gains.max_tilt", "tuned"},
    {"gains.max_velocity", "assumed operator limit"},
    {"odometry.enabled", "assumed"},
    {"odometry.position_sigma", "assumed"},
    {"odometry.velocity_sigma", "assumed"},
    {"odometry.bias_walk_sigma", "assumed"},
    {"procedure.ramp_down_time", "assumed"},
    {"procedure.ramped_down_rpm", "assumed"},
    {"procedure.retract_throttle", "assumed"},
    {"procedure.rotate_back_throttle", "assumed"},
    {"procedure.hover_ramp_time", "assumed"},
    {"procedure.lean_away_speed", "assumed"},
    {"procedure.pumps_off_delay", "assumed"},
    {"procedure.valves_open_delay", "assumed"},
    {"procedure.detach_clearance", "assumed"},
    {"procedure.depth_goal", "assumed"},
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(std::string_view text, std::string_view key) {
  text = trim(text);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw ParseError("bad number for '" + std::string(key) + "': '" + std::string(text) + "'");
  }
  return value;
}

std::vector<double> parse_list(std::string_view text, std::string_view key) {
  std::vector<double> out;
  while (true) {
    const auto comma = text.find(',');
    out.push_back(parse_double(text.substr(0, comma), key));
    if (comma == std::string_view::npos) break;
    text.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_double(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

}  // namespace

ParameterSet ParameterSet::defaults() {
  ParameterSet p;
  for (const auto& t : kProvenance) p.provenance.emplace(t.name, t.provenance);
  // k_f / k_p follow from the force and power anchors.
  const RotorModel model = calibrate_rotor_coeffs(default_anchors(p.robot, p.env), p.robot);
  p.robot.rotor_thrust_coeff = model.k_f;
  p.robot.rotor_power_coeff = model.k_p;
  return p;
}

void ParameterSet::validate() const {
  const auto& r = robot;
  require(r.mass_base > 0 && r.mass_positioning > 0 && r.mass_tool > 0, "masses must be positive");
  require(r.rotor_thrust_coeff > 0, "rotor thrust coefficient must be positive");
  require(r.gantry_workspace.x() > 0 && r.gantry_workspace.y() > 0, "workspace must be positive");
  require(r.rotor_speed_limit > 0, "rotor speed limit must be positive");
  require(r.vacuum_max > 0 && r.pump_time_constant > 0 && r.valve_release_time_constant > 0,
          "suction constants must be positive");
  require(std::abs(env.wall_normal.norm() - 1.0) < 1e-9, "wall normal must be unit length");
  require(env.material.min_feed_force >= 0, "min feed force must be non-negative");
  require(env.tether_deployed_length >= 0, "tether length must be non-negative");
  require(tool.mass > 0, "tool mass must be positive");
  require(sensing.pixel_pitch > 0, "pixel pitch must be positive");
  require(gains.velocity_p >= 0 && gains.attitude_p >= 0 && gains.rate_p >= 0,
          "gains must be non-negative");
}

void for_each_param(ParameterSet& p,
                    const std::function<void(std::string_view, ParamRef)>& visit) {
  auto& r = p.robot;
  visit("robot.mass_base", &r.mass_base);
  visit("robot.mass_positioning", &r.mass_positioning);
  visit("robot.mass_tool", &r.mass_tool);
  visit("robot.tether_linear_density", &r.tether_linear_density);
  visit("robot.height", &r.height);
  visit("robot.width", &r.width);
  visit("robot.length", &r.length);
  visit("robot.prop_diameter", &r.prop_diameter);
  visit("robot.inertia_diag", &r.inertia_diag);
  visit("robot.rotor_thrust_coeff", &r.rotor_thrust_coeff);
  visit("robot.rotor_drag_ratio", &r.rotor_drag_ratio);
  visit("robot.rotor_power_coeff", &r.rotor_power_coeff);
  visit("robot.avionics_power", &r.avionics_power);
  visit("robot.rotor_speed_limit", &r.rotor_speed_limit);
  visit("robot.rotor_time_constant", &r.rotor_time_constant);
  visit("robot.rotor_arm_x", &r.rotor_arm_x);
  visit("robot.rotor_arm_y", &r.rotor_arm_y);
  visit("robot.rotor_height", &r.rotor_height);
  visit("robot.cup_diameter", &r.cup_diameter);
  visit("robot.cup_spacing", &r.cup_spacing);
  visit("robot.vacuum_max", &r.vacuum_max);
  visit("robot.pump_time_constant", &r.pump_time_constant);
  visit("robot.valve_release_time_constant", &r.valve_release_time_constant);
  visit("robot.attach_fraction", &r.attach_fraction);
  visit("robot.contact_gap", &r.contact_gap);
  visit("robot.contact_speed", &r.contact_speed);
  visit("robot.mu_warm", &r.mu_warm);
  visit("robot.mu_warm_temperature", &r.mu_warm_temperature);
  visit("robot.mu_cold", &r.mu_cold);
  visit("robot.mu_cold_temperature", &r.mu_cold_temperature);
  visit("robot.slip_rate_coeff", &r.slip_rate_coeff);
  visit("robot.cup_release_speed", &r.cup_release_speed);
  visit("robot.slide_friction_force", &r.slide_friction_force);
  visit("robot.slide_travel", &r.slide_travel);
  visit("robot.hinge_in_body", &r.hinge_in_body);
  visit("robot.hinge_in_attachment", &r.hinge_in_attachment);
  visit("robot.engage_tolerance_theta", &r.engage_tolerance_theta);
  visit("robot.engage_tolerance_slide", &r.engage_tolerance_slide);
  visit("robot.tooltip_offset", &r.tooltip_offset);
  visit("robot.gantry_workspace", &r.gantry_workspace);
  visit("robot.gantry_center", &r.gantry_center);
  visit("robot.gantry_speed_limit", &r.gantry_speed_limit);
  visit("robot.gantry_backlash", &r.gantry_backlash);
  visit("robot.com_offset_flight", &r.com_offset_flight);

  auto& e = p.env;
  visit("env.gravity", &e.gravity);
  visit("env.wall_point", &e.wall_point);
  visit("env.wall_normal", &e.wall_normal);
  visit("env.material.min_feed_force", &e.material.min_feed_force);
  visit("env.material.drill_rate_coeff", &e.material.drill_rate_coeff);
  visit("env.ambient_temperature", &e.ambient_temperature);
  visit("env.tether_attach_point", &e.tether_attach_point);
  visit("env.tether_deployed_length", &e.tether_deployed_length);

  visit("tool.mass", &p.tool.mass);
  visit("tool.min_feed_force", &p.tool.min_feed_force);
  visit("tool.drill_rate_coeff", &p.tool.drill_rate_coeff);
  visit("tool.max_depth", &p.tool.max_depth);

  visit("sensing.laser_offset", &p.sensing.laser_offset);
  visit("sensing.pixel_pitch", &p.sensing.pixel_pitch);
  visit("sensing.pointing_noise_sigma", &p.sensing.pointing_noise_sigma);
  visit("sensing.quantize", &p.sensing.quantize);

  visit("hole_noise.thrust_imbalance_sigma", &p.hole_noise.thrust_imbalance_sigma);
  visit("hole_noise.imbalance_drift_gain", &p.hole_noise.imbalance_drift_gain);
  visit("hole_noise.slide_jitter_sigma", &p.hole_noise.slide_jitter_sigma);

  auto& g = p.gains;
  visit("gains.velocity_p", &g.velocity_p);
  visit("gains.velocity_d", &g.velocity_d);
  visit("gains.attitude_p", &g.attitude_p);
  visit("gains.attitude_d", &g.attitude_d);
  visit("gains.rate_p", &g.rate_p);
  visit("gains.rate_d", &g.rate_d);
  visit("gains.yaw_p", &g.yaw_p);
  visit("gains.max_tilt", &g.max_tilt);
  visit("gains.max_velocity", &g.max_velocity);

  visit("odometry.enabled", &p.odometry.enabled);
  visit("odometry.position_sigma", &p.odometry.position_sigma);
  visit("odometry.velocity_sigma", &p.odometry.velocity_sigma);
  visit("odometry.bias_walk_sigma", &p.odometry.bias_walk_sigma);

  auto& pr = p.procedure;
  visit("procedure.ramp_down_time", &pr.ramp_down_time);
  visit("procedure.ramped_down_rpm", &pr.ramped_down_rpm);
  visit("procedure.retract_throttle", &pr.retract_throttle);
  visit("procedure.rotate_back_throttle", &pr.rotate_back_throttle);
  visit("procedure.hover_ramp_time", &pr.hover_ramp_time);
  visit("procedure.lean_away_speed", &pr.lean_away_speed);
  visit("procedure.pumps_off_delay", &pr.pumps_off_delay);
  visit("procedure.valves_open_delay", &pr.valves_open_delay);
  visit("procedure.detach_clearance", &pr.detach_clearance);
  visit("procedure.depth_goal", &pr.depth_goal);
}

ParameterSet parse_params(std::string_view text) {
  ParameterSet params = ParameterSet::defaults();
  std::map<std::string, ParamRef, std::less<>> index;
  for_each_param(params, [&](std::string_view name, ParamRef ref) { index.emplace(name, ref); });

  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);

    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ParseError("line " + std::to_string(line_no) + ": expected 'name = value'");
    }
    const std::string_view key = trim(line.substr(0, eq));
    std::string_view value = trim(line.substr(eq + 1));
    std::string_view provenance;
    if (const auto semi = value.find(';'); semi != std::string_view::npos) {
      provenance = trim(value.substr(semi + 1));
      value = trim(value.substr(0, semi));
    }

    const auto it = index.find(key);
    if (it == index.end()) {
      throw ParseError("line " + std::to_string(line_no) + ": unknown parameter '" +
                       std::string(key) + "'");
    }
    std::visit(
        [&](auto* field) {
          using T = std::remove_pointer_t<decltype(field)>;
          if constexpr (std::is_same_v<T, double>) {
            *field = parse_double(value, key);
          } else if constexpr (std::is_same_v<T, bool>) {
            if (value == "true" || value == "1") {
              *field = true;
            } else if (value == "false" || value == "0") {
              *field = false;
            } else {
              throw ParseError("bad boolean for '" + std::string(key) + "'");
            }
          } else {
            const auto list = parse_list(value, key);
            if (static_cast<Eigen::Index>(list.size()) != T::RowsAtCompileTime) {
              throw ParseError("wrong vector size for '" + std::string(key) + "'");
            }
            for (std::size_t i = 0; i < list.size(); ++i) (*field)[static_cast<Eigen::Index>(i)] = list[i];
          }
        },
        it->second);
    if (!provenance.empty()) params.provenance[std::string(key)] = std::string(provenance);
  }
  try {
    params.validate();
  } catch (const ContractViolation& e) {
    throw ParseError(std::string("invalid parameters: ") + e.what());
  }
  return params;
}

ParameterSet load_params(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open parameter file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_params(buffer.str());
}

std::string format_params(const ParameterSet& params) {
  ParameterSet copy = params;
  std::ostringstream out;
  out << "# perchsim parameter file: name = value ; provenance\n";
  for_each_param(copy, [&](std::string_view name, ParamRef ref) {
    out << name << " = ";
    std::visit(
        [&](auto* field) {
          using T = std::remove_pointer_t<decltype(field)>;
          if constexpr (std::is_same_v<T, double>) {
            out << format_double(*field);
          } else if constexpr (std::is_same_v<T, bool>) {
            out << (*field ? "true" : "false");
          } else {
            for (Eigen::Index i = 0; i < field->size(); ++i) {
              if (i) out << ", ";
              out << format_double((*field)[i]);
            }
          }
        },
        ref);
    if (const auto it = params.provenance.find(name); it != params.provenance.end()) {
      out << " ; " << it->second;
    }
    out << '\n';
  });
  return out.str();
}

double total_mass(const RobotParams& params, double tether_deployed_length) {
  require(tether_deployed_length >= 0.0, "tether length must be non-negative");
  return params.total_static_mass() + params.tether_linear_density * tether_deployed_length;
}

double cup_friction(const RobotParams& p, double temperature_c) {
  if (temperature_c >= p.mu_warm_temperature) return p.mu_warm;
  if (temperature_c <= p.mu_cold_temperature) return p.mu_cold;
  const double s = (temperature_c - p.mu_cold_temperature) /
                   (p.mu_warm_temperature - p.mu_cold_temperature);
  return p.mu_cold + s * (p.mu_warm - p.mu_cold);
}

}  // namespace perch

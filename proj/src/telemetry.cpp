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

#include "perchsim/telemetry.hpp"

#include <iomanip>

namespace perch {

std::string_view telemetry_csv_header() {
  return "time,mode,hinge,theta_deg,slide_mm,pos_x,pos_y,pos_z,q_w,q_x,q_y,q_z,"
         "rpm_fl,rpm_fr,rpm_bl,rpm_br,cup0_kpa,cup1_kpa,cup0_attached,cup1_attached,"
         "pumps_on,valves_open,feed_force_n,power_w,gantry_x_mm,gantry_y_mm,drill_depth_mm,"
         "tool_on,laser_u_px,laser_v_px,laser_visible,wall_distance_m,detach_phase,"
         "last_rejection";
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

void write_csv_row(std::ostream& os, const TelemetryRecord& r) {
  const auto flags = os.flags();
  os << std::setprecision(10);
  os << r.time << ',' << to_string(r.mode) << ',' << to_string(r.hinge) << ',' << r.theta_deg
     << ',' << r.slide_mm;
  for (int i = 0; i < 3; ++i) os << ',' << r.position[i];
  for (int i = 0; i < 4; ++i) os << ',' << r.orientation_wxyz[i];
  for (int i = 0; i < 4; ++i) os << ',' << r.rotor_rpm[i];
  for (double p : r.cup_pressure_kpa) os << ',' << p;
  for (bool a : r.attached) os << ',' << int(a);
  os << ',' << int(r.pumps_on) << ',' << int(r.valves_open) << ',' << r.feed_force << ','
     << r.power << ',' << r.gantry_mm.x() << ',' << r.gantry_mm.y() << ',' << r.drill_depth_mm
     << ',' << int(r.tool_on) << ',' << r.laser_pixel.x() << ',' << r.laser_pixel.y() << ','
     << int(r.laser_visible) << ',' << r.wall_distance << ',' << r.detach_phase << ','
     << csv_escape(r.last_rejection) << '\n';
  os.flags(flags);
}

nlohmann::json to_json(const TelemetryRecord& r) {
  return nlohmann::json{
      {"schema", kTelemetrySchemaVersion},
      {"type", "telemetry"},
      {"time", r.time},
      {"mode", to_string(r.mode)},
      {"hinge", to_string(r.hinge)},
      {"theta_deg", r.theta_deg},
      {"slide_mm", r.slide_mm},
      {"position", {r.position.x(), r.position.y(), r.position.z()}},
      {"orientation_wxyz",
       {r.orientation_wxyz[0], r.orientation_wxyz[1], r.orientation_wxyz[2], r.orientation_wxyz[3]}},
      {"rotor_rpm", {r.rotor_rpm[0], r.rotor_rpm[1], r.rotor_rpm[2], r.rotor_rpm[3]}},
      {"cup_pressure_kpa", r.cup_pressure_kpa},
      {"attached", r.attached},
      {"pumps_on", r.pumps_on},
      {"valves_open", r.valves_open},
      {"feed_force_n", r.feed_force},
      {"power_w", r.power},
      {"gantry_mm", {r.gantry_mm.x(), r.gantry_mm.y()}},
      {"drill_depth_mm", r.drill_depth_mm},
      {"tool_on", r.tool_on},
      {"laser_pixel", {r.laser_pixel.x(), r.laser_pixel.y()}},
      {"laser_visible", r.laser_visible},
      {"wall_distance_m", r.wall_distance},
      {"detach_phase", r.detach_phase},
      {"last_rejection", r.last_rejection},
  };
}

namespace {

HingeLockState hinge_from_string(const std::string& s) {
  for (auto h : {HingeLockState::Locked, HingeLockState::Released, HingeLockState::RotationLocked}) {
    if (s == to_string(h)) return h;
  }
  throw ParseError("unknown hinge state '" + s + "'");
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != N) throw ParseError("vector field has wrong length");
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v[i] = j.at(i).get<double>();
  return v;
}

}  // namespace

TelemetryRecord telemetry_from_json(const nlohmann::json& j) {
  try {
    if (j.at("schema").get<int>() != kTelemetrySchemaVersion) {
      throw ParseError("unsupported telemetry schema");
    }
    TelemetryRecord r;
    r.time = j.at("time").get<double>();
    const auto mode = mode_from_string(j.at("mode").get<std::string>());
    if (!mode) throw ParseError("unknown mode");
    r.mode = *mode;
    r.hinge = hinge_from_string(j.at("hinge").get<std::string>());
    r.theta_deg = j.at("theta_deg").get<double>();
    r.slide_mm = j.at("slide_mm").get<double>();
    r.position = vec<3>(j.at("position"));
    r.orientation_wxyz = vec<4>(j.at("orientation_wxyz"));
    r.rotor_rpm = vec<4>(j.at("rotor_rpm"));
    r.cup_pressure_kpa = j.at("cup_pressure_kpa").get<std::array<double, kCupCount>>();
    r.attached = j.at("attached").get<std::array<bool, kCupCount>>();
    r.pumps_on = j.at("pumps_on").get<bool>();
    r.valves_open = j.at("valves_open").get<bool>();
    r.feed_force = j.at("feed_force_n").get<double>();
    r.power = j.at("power_w").get<double>();
    r.gantry_mm = vec<2>(j.at("gantry_mm"));
    r.drill_depth_mm = j.at("drill_depth_mm").get<double>();
    r.tool_on = j.at("tool_on").get<bool>();
    r.laser_pixel = vec<2>(j.at("laser_pixel"));
    r.laser_visible = j.at("laser_visible").get<bool>();
    r.wall_distance = j.at("wall_distance_m").get<double>();
    r.detach_phase = j.at("detach_phase").get<std::string>();
    r.last_rejection = j.at("last_rejection").get<std::string>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("bad telemetry record: ") + e.what());
  }
}

}  // namespace perch

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

#include "perchsim/state.hpp"

#include <bit>
#include <charconv>
#include <cstdint>
#include <sstream>
#include <vector>

namespace perch {

Eigen::Isometry3d Pose::isometry() const {
  Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
  t.linear() = orientation.toRotationMatrix();
  t.translation() = position;
  return t;
}

Pose Pose::from_isometry(const Eigen::Isometry3d& iso) {
  Pose p;
  p.position = iso.translation();
  p.orientation = Quat(iso.linear()).normalized();
  return p;
}

namespace {

void put(std::ostringstream& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out << ' ' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
}

template <typename Vec>
void put_vec(std::ostringstream& out, const char* key, const Vec& v) {
  out << key;
  for (Eigen::Index i = 0; i < v.size(); ++i) put(out, v[i]);
  out << '\n';
}

void put_scalar(std::ostringstream& out, const char* key, double v) {
  out << key;
  put(out, v);
  out << '\n';
}

void put_quat(std::ostringstream& out, const char* key, const Quat& q) {
  out << key;
  put(out, q.w());
  put(out, q.x());
  put(out, q.y());
  put(out, q.z());
  out << '\n';
}

std::vector<double> values_of(std::string_view line) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && line[pos] == ' ') ++pos;
    if (pos >= line.size()) break;
    std::size_t end = line.find(' ', pos);
    if (end == std::string_view::npos) end = line.size();
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(line.data() + pos, line.data() + end, v);
    if (ec != std::errc() || ptr != line.data() + end) {
      throw std::runtime_error("bad state value '" + std::string(line.substr(pos, end - pos)) + "'");
    }
    out.push_back(v);
    pos = end;
  }
  return out;
}

bool same(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

template <typename Vec>
bool same_vec(const Vec& a, const Vec& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (!same(a[i], b[i])) return false;
  }
  return true;
}

bool same_quat(const Quat& a, const Quat& b) {
  return same_vec(a.coeffs(), b.coeffs());
}

}  // namespace

std::string serialize(const SimState& s) {
  std::ostringstream out;
  out << "simstate 1\n";
  put_scalar(out, "time", s.time);
  put_vec(out, "body_position", s.body_pose.position);
  put_quat(out, "body_orientation", s.body_pose.orientation);
  put_vec(out, "linear_velocity", s.linear_velocity);
  put_vec(out, "angular_velocity", s.angular_velocity);
  put_scalar(out, "hinge_theta", s.hinge_theta);
  put_scalar(out, "hinge_slide", s.hinge_slide);
  put_scalar(out, "hinge_theta_rate", s.hinge_theta_rate);
  put_scalar(out, "hinge_slide_rate", s.hinge_slide_rate);
  put_vec(out, "rotor_speeds", s.rotor_speeds);
  put_vec(out, "cup_pressures", Eigen::Vector2d(s.cup_pressures[0], s.cup_pressures[1]));
  out << "attached " << int(s.attached[0]) << ' ' << int(s.attached[1]) << '\n';
  put_vec(out, "gantry_pos", s.gantry_pos);
  put_scalar(out, "drill_depth", s.drill_depth);
  put_vec(out, "attachment_position", s.attachment_pose.position);
  put_quat(out, "attachment_orientation", s.attachment_pose.orientation);
  return out.str();
}

SimState deserialize(std::string_view text) {
  SimState s;
  bool header = false;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    const std::string_view line = text.substr(0, nl);
    text.remove_prefix(nl == std::string_view::npos ? text.size() : nl + 1);
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    const std::string_view key = line.substr(0, sp);
    const std::string_view rest = sp == std::string_view::npos ? std::string_view{} : line.substr(sp + 1);
    if (key == "simstate") {
      header = true;
      continue;
    }
    const auto v = values_of(rest);
    auto need = [&](std::size_t n) {
      if (v.size() != n) throw std::runtime_error("wrong arity for state key " + std::string(key));
    };
    if (key == "time") { need(1); s.time = v[0]; }
    else if (key == "body_position") { need(3); s.body_pose.position = Vec3(v[0], v[1], v[2]); }
    else if (key == "body_orientation") { need(4); s.body_pose.orientation = Quat(v[0], v[1], v[2], v[3]); }
    else if (key == "linear_velocity") { need(3); s.linear_velocity = Vec3(v[0], v[1], v[2]); }
    else if (key == "angular_velocity") { need(3); s.angular_velocity = Vec3(v[0], v[1], v[2]); }
    else if (key == "hinge_theta") { need(1); s.hinge_theta = v[0]; }
    else if (key == "hinge_slide") { need(1); s.hinge_slide = v[0]; }
    else if (key == "hinge_theta_rate") { need(1); s.hinge_theta_rate = v[0]; }
    else if (key == "hinge_slide_rate") { need(1); s.hinge_slide_rate = v[0]; }
    else if (key == "rotor_speeds") { need(4); s.rotor_speeds = Vec4(v[0], v[1], v[2], v[3]); }
    else if (key == "cup_pressures") { need(2); s.cup_pressures = {v[0], v[1]}; }
    else if (key == "attached") { need(2); s.attached = {v[0] != 0.0, v[1] != 0.0}; }
    else if (key == "gantry_pos") { need(2); s.gantry_pos = Vec2(v[0], v[1]); }
    else if (key == "drill_depth") { need(1); s.drill_depth = v[0]; }
    else if (key == "attachment_position") { need(3); s.attachment_pose.position = Vec3(v[0], v[1], v[2]); }
    else if (key == "attachment_orientation") { need(4); s.attachment_pose.orientation = Quat(v[0], v[1], v[2], v[3]); }
    else throw std::runtime_error("unknown state key " + std::string(key));
  }
  if (!header) throw std::runtime_error("missing simstate header");
  return s;
}

bool bitwise_equal(const SimState& a, const SimState& b) {
  return same(a.time, b.time) && same_vec(a.body_pose.position, b.body_pose.position) &&
         same_quat(a.body_pose.orientation, b.body_pose.orientation) &&
         same_vec(a.linear_velocity, b.linear_velocity) &&
         same_vec(a.angular_velocity, b.angular_velocity) && same(a.hinge_theta, b.hinge_theta) &&
         same(a.hinge_slide, b.hinge_slide) && same(a.hinge_theta_rate, b.hinge_theta_rate) &&
         same(a.hinge_slide_rate, b.hinge_slide_rate) && same_vec(a.rotor_speeds, b.rotor_speeds) &&
         same(a.cup_pressures[0], b.cup_pressures[0]) && same(a.cup_pressures[1], b.cup_pressures[1]) &&
         a.attached == b.attached && same_vec(a.gantry_pos, b.gantry_pos) &&
         same(a.drill_depth, b.drill_depth) &&
         same_vec(a.attachment_pose.position, b.attachment_pose.position) &&
         same_quat(a.attachment_pose.orientation, b.attachment_pose.orientation);
}

}  // namespace perch

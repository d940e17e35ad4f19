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

#include "perchsim/commands.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <vector>

namespace perch {

namespace {

constexpr std::array<std::pair<Mode, const char*>, 5> kModeNames{{
    {Mode::Flight, "flight"},
    {Mode::Perching, "perching"},
    {Mode::Rotation, "rotation"},
    {Mode::Manipulation, "manipulation"},
    {Mode::Detachment, "detachment"},
}};

std::vector<std::string_view> split(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

double number(std::string_view tok) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v)) {
    throw ParseError("bad number '" + std::string(tok) + "'");
  }
  return v;
}

bool choice(std::string_view tok, std::string_view yes, std::string_view no) {
  if (tok == yes) return true;
  if (tok == no) return false;
  throw ParseError("expected '" + std::string(yes) + "' or '" + std::string(no) + "', got '" +
                   std::string(tok) + "'");
}

void arity(const std::vector<std::string_view>& t, std::size_t n) {
  if (t.size() != n + 1) {
    throw ParseError("'" + std::string(t[0]) + "' takes " + std::to_string(n) + " argument(s)");
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

const char* to_string(Mode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

std::optional<Mode> mode_from_string(std::string_view text) {
  for (const auto& [m, name] : kModeNames) {
    if (text == name) return m;
  }
  return std::nullopt;
}

OperatorCommand parse_command(std::string_view text) {
  const auto t = split(text);
  if (t.empty()) throw ParseError("empty command");
  const std::string_view op = t[0];
  if (op == "flight_ref") {
    arity(t, 4);
    return SetFlightRef{Vec3(number(t[1]), number(t[2]), number(t[3])), deg2rad(number(t[4]))};
  }
  if (op == "mode") {
    arity(t, 1);
    const auto m = mode_from_string(t[1]);
    if (!m) throw ParseError("unknown mode '" + std::string(t[1]) + "'");
    return SetMode{*m};
  }
  if (op == "pumps") {
    arity(t, 1);
    return Pumps{choice(t[1], "on", "off")};
  }
  if (op == "valves") {
    arity(t, 1);
    return Valves{choice(t[1], "open", "close")};
  }
  if (op == "rotation_throttle") {
    arity(t, 1);
    return RotationThrottle{number(t[1])};
  }
  if (op == "feed_throttle") {
    arity(t, 2);
    const bool adv = choice(t[2], "advance", "retract");
    return FeedThrottle{number(t[1]), adv ? FeedDirection::Advance : FeedDirection::Retract};
  }
  if (op == "gantry") {
    arity(t, 2);
    return GantryTarget{Vec2(number(t[1]), number(t[2]))};
  }
  if (op == "tool") {
    arity(t, 1);
    return ToolPower{choice(t[1], "on", "off")};
  }
  if (op == "ramp_down") {
    arity(t, 0);
    return RampDownRotors{};
  }
  throw ParseError("unknown command '" + std::string(op) + "'");
}

std::string format_command(const OperatorCommand& command) {
  struct Visitor {
    std::string operator()(const SetFlightRef& c) const {
      return "flight_ref " + fmt(c.velocity.x()) + " " + fmt(c.velocity.y()) + " " +
             fmt(c.velocity.z()) + " " + fmt(rad2deg(c.heading));
    }
    std::string operator()(const SetMode& c) const { return std::string("mode ") + to_string(c.mode); }
    std::string operator()(const Pumps& c) const { return c.on ? "pumps on" : "pumps off"; }
    std::string operator()(const Valves& c) const { return c.open ? "valves open" : "valves close"; }
    std::string operator()(const RotationThrottle& c) const {
      return "rotation_throttle " + fmt(c.value);
    }
    std::string operator()(const FeedThrottle& c) const {
      return "feed_throttle " + fmt(c.value) +
             (c.direction == FeedDirection::Advance ? " advance" : " retract");
    }
    std::string operator()(const GantryTarget& c) const {
      return "gantry " + fmt(c.xy.x()) + " " + fmt(c.xy.y());
    }
    std::string operator()(const ToolPower& c) const { return c.on ? "tool on" : "tool off"; }
    std::string operator()(const RampDownRotors&) const { return "ramp_down"; }
  };
  return std::visit(Visitor{}, command);
}

}  // namespace perch

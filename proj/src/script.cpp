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

#include "perchsim/script.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace perch {

namespace {

constexpr std::array<std::pair<Condition, const char*>, 10> kConditionNames{{
    {Condition::Contact, "contact"},
    {Condition::Attached, "attached"},
    {Condition::RampedDown, "ramped_down"},
    {Condition::GantryArrived, "gantry_arrived"},
    {Condition::ThetaUp, "theta_up"},
    {Condition::AtWall, "at_wall"},
    {Condition::DepthGoal, "depth_goal"},
    {Condition::Retracted, "retracted"},
    {Condition::DetachComplete, "detach_complete"},
    {Condition::Separated, "separated"},
}};

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view next_token(std::string_view& s) {
  s = trim(s);
  std::size_t end = 0;
  while (end < s.size() && !std::isspace(static_cast<unsigned char>(s[end]))) ++end;
  const std::string_view tok = s.substr(0, end);
  s.remove_prefix(end);
  return tok;
}

double seconds(std::string_view tok) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || !std::isfinite(v) || v < 0.0) {
    throw ParseError("bad time '" + std::string(tok) + "'");
  }
  return v;
}

Trigger parse_condition(std::string_view tok) {
  Trigger t;
  t.kind = Trigger::Kind::When;
  if (tok.substr(0, 5) == "mode=") {
    const auto m = mode_from_string(tok.substr(5));
    if (!m) throw ParseError("unknown mode in condition '" + std::string(tok) + "'");
    t.condition = Condition::ModeIs;
    t.mode = *m;
    return t;
  }
  for (const auto& [c, name] : kConditionNames) {
    if (tok == name) {
      t.condition = c;
      return t;
    }
  }
  throw ParseError("unknown condition '" + std::string(tok) + "'");
}

}  // namespace

MissionScript parse_script(std::string_view text) {
  MissionScript script;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      ScriptEntry entry;
      entry.line = line_no;
      const std::string_view kw = next_token(line);
      const std::string_view arg = next_token(line);
      if (arg.empty()) throw ParseError("missing trigger argument");
      if (kw == "at") {
        entry.trigger.kind = Trigger::Kind::At;
        entry.trigger.seconds = seconds(arg);
      } else if (kw == "after") {
        entry.trigger.kind = Trigger::Kind::After;
        entry.trigger.seconds = seconds(arg);
      } else if (kw == "when") {
        entry.trigger = parse_condition(arg);
      } else {
        throw ParseError("expected 'at', 'after' or 'when', got '" + std::string(kw) + "'");
      }
      entry.command = parse_command(line);
      script.entries.push_back(std::move(entry));
    } catch (const ParseError& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return script;
}

MissionScript load_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open mission script " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_script(ss.str());
}

std::string format_trigger(const Trigger& t) {
  std::ostringstream os;
  os.precision(17);
  switch (t.kind) {
    case Trigger::Kind::At:
      os << "at " << t.seconds;
      break;
    case Trigger::Kind::After:
      os << "after " << t.seconds;
      break;
    case Trigger::Kind::When:
      os << "when ";
      if (t.condition == Condition::ModeIs) {
        os << "mode=" << to_string(t.mode);
      } else {
        for (const auto& [c, name] : kConditionNames) {
          if (c == t.condition) os << name;
        }
      }
      break;
  }
  return os.str();
}

std::string format_script(const MissionScript& script) {
  std::string out;
  for (const auto& e : script.entries) {
    out += format_trigger(e.trigger) + " " + format_command(e.command) + "\n";
  }
  return out;
}

bool condition_holds(Condition condition, Mode mode, const Simulation& sim) {
  const SimState& s = sim.state();
  const MissionView v = sim.view();
  switch (condition) {
    case Condition::Contact: return v.contact;
    case Condition::Attached: return v.attached;
    case Condition::RampedDown: return v.ramped_down && v.gantry_centered;
    case Condition::GantryArrived: return sim.gantry().arrived();
    case Condition::ThetaUp:
      return std::abs(s.hinge_theta - 0.5 * kPi) <= sim.params().robot.engage_tolerance_theta &&
             std::abs(s.hinge_theta_rate) < 1e-3;
    case Condition::AtWall: return sim.diagnostics().contact_force > 0.0;
    case Condition::DepthGoal: return v.depth_goal_reached;
    case Condition::Retracted: return s.hinge_slide <= 5e-4;
    case Condition::DetachComplete: return v.detach_complete;
    case Condition::Separated: return !s.any_attached();
    case Condition::ModeIs: return sim.mode() == mode;
  }
  return false;
}

std::optional<ScriptPlayer::Rejection> ScriptPlayer::poll(Simulation& sim) {
  const double now = sim.state().time;
  while (next_ < script_.entries.size()) {
    const ScriptEntry& e = script_.entries[next_];
    bool due = false;
    switch (e.trigger.kind) {
      case Trigger::Kind::At: due = now >= e.trigger.seconds - 1e-9; break;
      case Trigger::Kind::After: due = now >= last_fire_ + e.trigger.seconds - 1e-9; break;
      case Trigger::Kind::When: due = condition_holds(e.trigger.condition, e.trigger.mode, sim); break;
    }
    if (!due) return std::nullopt;
    const CommandOutcome out = sim.submit(e.command);
    ++next_;
    last_fire_ = now;
    if (!out.accepted) return Rejection{e.line, format_command(e.command), out.reason};
  }
  return std::nullopt;
}

}  // namespace perch

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

#include <array>
#include <string>

#include "perchsim/dynamics.hpp"

namespace perch {

struct SuctionCupState {
  double pressure_deficit = 0.0;  // Pa
  bool pump_on = false;
  bool valve_open = false;
  bool contact = false;
  bool attached = false;
  double slip_accum = 0.0;        // m of attachment slide along the wall
};

using CupPair = std::array<SuctionCupState, kCupCount>;

/// Advances contact, pressure and adhesion for both cups.
/// Contact needs gap <= contact_gap and approach speed <= contact_speed; a
/// sealed (attached) cup keeps contact until it releases.
CupPair update_suction(const CupPair& cups, const std::array<double, kCupCount>& wall_gaps,
                       double approach_speed, double dt, const RobotParams& params);

struct HoldingResult {
  double capacity = 0.0;   // sum of pressure * area, N
  double tension = 0.0;    // pull-off component of the load, N (negative = compression)
  double normal = 0.0;     // clamping force available for friction, N
  double shear = 0.0;      // in-plane load magnitude, N
  double critical_mu = 0.0;
  bool slips = false;
  bool pull_off = false;
};

/// Friction-cone check of a load applied to F_A (force in F_A, x_A into the
/// wall). Moments are carried by the cup lips and are not checked.
HoldingResult holding_wrench(const CupPair& cups, double mu, const Vec3& load_in_attachment,
                             const RobotParams& params);

/// Displacement of F_A along the wall for one step of slipping, in F_A.
Vec3 slip_displacement(const HoldingResult& hold, const Vec3& load_in_attachment, double mu,
                       double dt, const RobotParams& params);

enum class HingeLockState { Locked, Released, RotationLocked };

const char* to_string(HingeLockState state);

struct LockResult {
  HingeLockState state = HingeLockState::Locked;
  bool granted = false;
  std::string reason;
};

/// Pins travel full-in (Locked), full-out (Released), partial (RotationLocked);
/// only neighbouring states are reachable and engagement needs the hinge at
/// the matching stop.
LockResult set_hinge_lock(HingeLockState current, HingeLockState request, double theta,
                          double slide, const RobotParams& params);

HingeFreedoms freedoms_of(HingeLockState state);

}  // namespace perch

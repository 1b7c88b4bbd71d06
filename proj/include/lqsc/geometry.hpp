// Copyright 2026 The lqsc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lqsc/dynamics.hpp"

namespace lqsc {

enum class ConstraintKind {
  Empty,
  TerminalHalfSpace,  // forbidden only on the terminal section
  RunningHalfSpace,   // forbidden at every time
  TimeSlab,           // forbidden box at one instant t0
  Predicate,          // arbitrary membership function, grid-only detection
};

// Which side of the threshold is forbidden.
enum class HalfSpaceSide { Below, Above };

// The closed forbidden region D of the time-space domain. Membership uses
// closed comparisons: boundary points belong to D. For TimeSlab and
// TerminalHalfSpace the time coordinate is matched with absolute tolerance
// 1e-12, far below any usable step size.
struct ConstraintSet {
  ConstraintKind kind = ConstraintKind::Empty;
  std::size_t dim = 1;
  std::size_t axis = 0;
  double threshold = 0.0;
  HalfSpaceSide side = HalfSpaceSide::Below;
  // Terminal time for TerminalHalfSpace/Predicate, slab time for TimeSlab.
  double section_time = 0.0;
  std::vector<double> box_lo, box_hi;
  std::function<bool(double, std::span<const double>)> predicate;
  // Probe radius for boundary classification of Predicate sets.
  double boundary_eps = 1e-8;

  static ConstraintSet empty(std::size_t dim);
  static ConstraintSet terminal_half_space(std::size_t dim, std::size_t axis,
                                           double threshold, HalfSpaceSide side,
                                           double terminal_time);
  static ConstraintSet running_half_space(std::size_t dim, std::size_t axis,
                                          double threshold, HalfSpaceSide side);
  // Throws InvalidGeometry unless lo < hi componentwise.
  static ConstraintSet time_slab(std::size_t dim, double t0,
                                 std::vector<double> lo, std::vector<double> hi);
  static ConstraintSet from_predicate(
      std::size_t dim, double terminal_time,
      std::function<bool(double, std::span<const double>)> membership);
};

// True iff (t, x) lies in the forbidden set.
bool contains(const ConstraintSet& set, double t, std::span<const double> x);

// Partition of the terminal section: the survival part, the interior of the
// forbidden part, and the boundary between them (where the killed expectation
// may be discontinuous).
enum class TerminalClass { SurvivalSection, ForbiddenInterior, Boundary };

TerminalClass classify_terminal(const ConstraintSet& set,
                                std::span<const double> x);

enum class KillMechanism { None, GridPoint, BridgeCrossing, TerminalSection };

// Discrete first-entry report. kill_index is the first grid index inside D,
// or the right endpoint of the step whose bridge test fired.
struct KillReport {
  bool killed = false;
  std::optional<std::size_t> kill_index;
  KillMechanism mechanism = KillMechanism::None;
};

// Scans a simulated path for entry into D. With use_bridge set and a
// RunningHalfSpace constraint, each step whose endpoints both survive is
// additionally killed with the Brownian-bridge crossing probability
// exp(-2*d_k*d_{k+1} / (sigma_bar^2 * dt)), where the d's are the endpoint
// distances to the barrier along its axis and sigma_bar is the dispersion
// magnitude of that axis at the left endpoint. The Bernoulli draw comes from
// the path's own reserved stream lane, so detection is deterministic. The
// correction is exact for constant coefficients and removes the dominant
// O(sqrt(dt)) survival bias of grid-only detection; Predicate sets get
// grid-only detection.
KillReport detect_kill(const ConstraintSet& set, const CoefficientField& field,
                       const PathSample& path, const NoiseStream& stream,
                       bool use_bridge);

}  // namespace lqsc

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

#include "lqsc/geometry.hpp"

#include <cmath>

#include "lqsc/errors.hpp"

namespace lqsc {

namespace {

constexpr double kTimeTol = 1e-12;

bool at_time(double t, double t0) { return std::fabs(t - t0) <= kTimeTol; }

void check_dim(const ConstraintSet& set, std::span<const double> x) {
  if (x.size() != set.dim)
    throw DimensionMismatch("constraint: state has wrong length");
}

bool half_space_inside(const ConstraintSet& set, double xi) {
  return set.side == HalfSpaceSide::Below ? xi <= set.threshold
                                          : xi >= set.threshold;
}

bool box_inside(const ConstraintSet& set, std::span<const double> x) {
  for (std::size_t i = 0; i < set.dim; ++i) {
    if (x[i] < set.box_lo[i] || x[i] > set.box_hi[i]) return false;
  }
  return true;
}

}  // namespace

ConstraintSet ConstraintSet::empty(std::size_t dim) {
  ConstraintSet s;
  s.kind = ConstraintKind::Empty;
  s.dim = dim;
  return s;
}

ConstraintSet ConstraintSet::terminal_half_space(std::size_t dim,
                                                 std::size_t axis,
                                                 double threshold,
                                                 HalfSpaceSide side,
                                                 double terminal_time) {
  if (axis >= dim) throw InvalidGeometry("half-space axis out of range");
  ConstraintSet s;
  s.kind = ConstraintKind::TerminalHalfSpace;
  s.dim = dim;
  s.axis = axis;
  s.threshold = threshold;
  s.side = side;
  s.section_time = terminal_time;
  return s;
}

ConstraintSet ConstraintSet::running_half_space(std::size_t dim,
                                                std::size_t axis,
                                                double threshold,
                                                HalfSpaceSide side) {
  if (axis >= dim) throw InvalidGeometry("half-space axis out of range");
  ConstraintSet s;
  s.kind = ConstraintKind::RunningHalfSpace;
  s.dim = dim;
  s.axis = axis;
  s.threshold = threshold;
  s.side = side;
  return s;
}

ConstraintSet ConstraintSet::time_slab(std::size_t dim, double t0,
                                       std::vector<double> lo,
                                       std::vector<double> hi) {
  if (lo.size() != dim || hi.size() != dim)
    throw InvalidGeometry("time slab box has wrong dimension");
  for (std::size_t i = 0; i < dim; ++i) {
    if (!(lo[i] < hi[i]))
      throw InvalidGeometry("time slab box must satisfy lo < hi");
  }
  ConstraintSet s;
  s.kind = ConstraintKind::TimeSlab;
  s.dim = dim;
  s.section_time = t0;
  s.box_lo = std::move(lo);
  s.box_hi = std::move(hi);
  return s;
}

ConstraintSet ConstraintSet::from_predicate(
    std::size_t dim, double terminal_time,
    std::function<bool(double, std::span<const double>)> membership) {
  ConstraintSet s;
  s.kind = ConstraintKind::Predicate;
  s.dim = dim;
  s.section_time = terminal_time;
  s.predicate = std::move(membership);
  return s;
}

bool contains(const ConstraintSet& set, double t, std::span<const double> x) {
  check_dim(set, x);
  switch (set.kind) {
    case ConstraintKind::Empty:
      return false;
    case ConstraintKind::TerminalHalfSpace:
      return at_time(t, set.section_time) && half_space_inside(set, x[set.axis]);
    case ConstraintKind::RunningHalfSpace:
      return half_space_inside(set, x[set.axis]);
    case ConstraintKind::TimeSlab:
      return at_time(t, set.section_time) && box_inside(set, x);
    case ConstraintKind::Predicate:
      return set.predicate(t, x);
  }
  return false;
}

TerminalClass classify_terminal(const ConstraintSet& set,
                                std::span<const double> x) {
  check_dim(set, x);
  switch (set.kind) {
    case ConstraintKind::Empty:
      return TerminalClass::SurvivalSection;
    case ConstraintKind::TerminalHalfSpace:
    case ConstraintKind::RunningHalfSpace: {
      const double xi = x[set.axis];
      if (xi == set.threshold) return TerminalClass::Boundary;
      return half_space_inside(set, xi) ? TerminalClass::ForbiddenInterior
                                        : TerminalClass::SurvivalSection;
    }
    case ConstraintKind::TimeSlab: {
      if (!box_inside(set, x)) return TerminalClass::SurvivalSection;
      for (std::size_t i = 0; i < set.dim; ++i) {
        if (x[i] == set.box_lo[i] || x[i] == set.box_hi[i])
          return TerminalClass::Boundary;
      }
      return TerminalClass::ForbiddenInterior;
    }
    case ConstraintKind::Predicate: {
      // Approximate: a membership flip within boundary_eps marks the boundary.
      const bool inside = set.predicate(set.section_time, x);
      std::vector<double> probe(x.begin(), x.end());
      for (std::size_t i = 0; i < set.dim; ++i) {
        for (double sgn : {-1.0, 1.0}) {
          probe[i] = x[i] + sgn * set.boundary_eps;
          if (set.predicate(set.section_time, probe) != inside)
            return TerminalClass::Boundary;
        }
        probe[i] = x[i];
      }
      return inside ? TerminalClass::ForbiddenInterior
                    : TerminalClass::SurvivalSection;
    }
  }
  return TerminalClass::SurvivalSection;
}

KillReport detect_kill(const ConstraintSet& set, const CoefficientField& field,
                       const PathSample& path, const NoiseStream& stream,
                       bool use_bridge) {
  const std::size_t n_points = path.valid_points();
  const bool bridge =
      use_bridge && set.kind == ConstraintKind::RunningHalfSpace;
  std::vector<double> sig(bridge ? field.dim_state * field.dim_noise : 0);

  for (std::size_t k = 0; k < n_points; ++k) {
    const double t = path.grid.point(k);
    const auto xk = path.state(k);
    if (contains(set, t, xk)) {
      const bool terminal = k == path.grid.n_steps();
      return {true, k,
              terminal ? KillMechanism::TerminalSection
                       : KillMechanism::GridPoint};
    }
    if (!bridge || k + 1 >= n_points) continue;
    const auto xk1 = path.state(k + 1);
    if (contains(set, path.grid.point(k + 1), xk1)) continue;  // next grid check kills
    const double dk = std::fabs(xk[set.axis] - set.threshold);
    const double dk1 = std::fabs(xk1[set.axis] - set.threshold);
    field.dispersion(t, xk, sig);
    double var = 0.0;
    for (std::size_t j = 0; j < field.dim_noise; ++j) {
      const double s = sig[set.axis * field.dim_noise + j];
      var += s * s;
    }
    const double denom = var * path.grid.step_len(k);
    if (denom <= 0.0) continue;  // degenerate dispersion cannot cross
    const double p_cross = std::exp(-2.0 * dk * dk1 / denom);
    if (stream.uniform_bridge(k) < p_cross)
      return {true, k + 1, KillMechanism::BridgeCrossing};
  }
  return {};
}

}  // namespace lqsc

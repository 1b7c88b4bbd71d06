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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lqsc/dynamics.hpp"
#include "lqsc/geometry.hpp"

namespace lqsc {

// Running cost f(t,x) >= 0 and terminal cost g(x) >= 0. Non-negativity is a
// caller obligation; it is what keeps every Monte Carlo summand in [0,1].
struct CostSpec {
  std::function<double(double, std::span<const double>)> running_cost;
  std::function<double(std::span<const double>)> terminal_cost;

  static CostSpec zero();
  static CostSpec constants(double f_value, double g_value);
};

// A Monte Carlo scalar. std_error is the sample standard deviation divided by
// sqrt(n). Paths aborted on a non-finite state are excluded from mean and
// std_error and counted in n_nonfinite; warning_nonfinite trips when they
// exceed 0.1% of the batch (a sign the grid is too coarse for the
// coefficient growth).
struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_paths = 0;
  std::size_t n_nonfinite = 0;
  bool warning_nonfinite = false;
};

// Bundle of the data defining one constrained control problem.
//
// effective_horizon is the time the killed expectation actually integrates
// to. It equals horizon except for slab constraints with no running or
// terminal cost beyond the slab time, where the problem reduces to the
// interval [t, t0]: nothing after t0 affects the value, so simulation stops
// there and the terminal section test happens at t0.
struct ProblemSpec {
  CoefficientField field;
  ConstraintSet constraint;
  CostSpec costs;
  double horizon = 1.0;
  double effective_horizon = 1.0;

  TimeGrid make_grid(double t, double dt) const {
    return TimeGrid(t, effective_horizon, dt);
  }
};

struct EstimatorOptions {
  bool use_bridge = true;
  unsigned workers = 1;
  // First stream index of the batch; grid estimation partitions this space
  // per distinct point so no two points share noise.
  std::uint64_t path_index_base = 0;
};

// Sample mean and standard error over the valid entries of a batch, using a
// fixed pairwise reduction so the result is independent of how the entries
// were produced. Invalid slots must hold zero. Throws AllPathsNonFinite when
// nothing is valid.
Estimate reduce_samples(std::span<const double> values,
                        std::span<const unsigned char> valid);

// Monte Carlo estimate of the killed expectation
//   u(t,x) = E[ exp(-1/2 int_t^T f(s,Z_s) ds - 1/2 g(Z_T)) ; survival ]
// over n_paths Euler paths on `grid` (which must span [t, effective
// horizon]). Killed paths contribute 0, which keeps the estimator unbiased
// for u itself. At t = effective horizon the exact terminal value is
// returned with zero std_error. Accumulation uses a fixed pairwise
// reduction, so the result is bit-identical for every worker count.
Estimate estimate_u(const ProblemSpec& problem, double t,
                    std::span<const double> x, std::size_t n_paths,
                    const TimeGrid& grid, std::uint64_t master_seed,
                    const EstimatorOptions& opts = {});

struct GridPointEstimate {
  std::optional<Estimate> estimate;
  std::string error;  // non-empty when this point failed
};

// Element-wise estimate_u over a list of (t, x) points, with the stream space
// partitioned per distinct point: duplicated points (bitwise equal) share a
// partition slot and therefore return identical estimates; distinct points
// never share noise. Per-point failures are reported in-place and do not
// abort the remaining points. grid_template supplies the step size; each
// point gets its own grid [t_i, effective horizon].
std::vector<GridPointEstimate> estimate_u_grid(
    const ProblemSpec& problem,
    std::span<const std::pair<double, std::vector<double>>> points,
    std::size_t n_paths, const TimeGrid& grid_template,
    std::uint64_t master_seed, const EstimatorOptions& opts = {});

struct GradientEstimate {
  std::vector<double> gradient;
  std::vector<double> std_error;
  std::size_t n_paths = 0;
  std::size_t n_nonfinite = 0;
};

// Central-difference estimate of the spatial gradient of u. Both one-sided
// estimates of coordinate i reuse the same noise streams (common random
// numbers), so the difference variance collapses; std_error[i] is computed
// from the per-path coupled differences. Throws PointOutsideC if any probe
// point x +- h_i e_i lies in the forbidden set.
GradientEstimate estimate_grad_u(const ProblemSpec& problem, double t,
                                 std::span<const double> x,
                                 std::span<const double> h,
                                 std::size_t n_paths, const TimeGrid& grid,
                                 std::uint64_t master_seed,
                                 const EstimatorOptions& opts = {});

// Default finite-difference step: max(1e-3, 1e-2 * sqrt(T - t)), the
// diffusive length scale at the remaining horizon.
double default_fd_step(const ProblemSpec& problem, double t);

}  // namespace lqsc

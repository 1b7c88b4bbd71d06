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

#include "lqsc/estimator.hpp"

#include <bit>
#include <cmath>
#include <map>

#include "lqsc/errors.hpp"
#include "lqsc/parallel.hpp"

namespace lqsc {

namespace {

constexpr double kTimeTol = 1e-12;
constexpr double kNonFiniteWarnFraction = 1e-3;

struct PathWeight {
  double weight = 0.0;
  bool nonfinite = false;
};

// Simulates one uncontrolled path from (grid.t_start, x0) and evaluates the
// killed-expectation summand exp(-1/2 int f - 1/2 g) 1{survival}.
PathWeight killed_weight(const ProblemSpec& problem, std::span<const double> x0,
                         const TimeGrid& grid, const NoiseStream& stream,
                         bool use_bridge) {
  const PathSample path =
      simulate_uncontrolled(problem.field, x0, grid, stream);
  if (path.nonfinite) return {0.0, true};
  const KillReport kill =
      detect_kill(problem.constraint, problem.field, path, stream, use_bridge);
  if (kill.killed) return {0.0, false};
  double cost = 0.0;
  const std::size_t n = grid.n_steps();
  for (std::size_t k = 0; k < n; ++k)
    cost += problem.costs.running_cost(grid.point(k), path.state(k)) *
            grid.step_len(k);
  cost += problem.costs.terminal_cost(path.state(n));
  if (!std::isfinite(cost)) return {0.0, true};
  return {std::exp(-0.5 * cost), false};
}

Estimate exact_terminal_estimate(const ProblemSpec& problem, double t,
                                 std::span<const double> x) {
  if (t > problem.effective_horizon + kTimeTol) {
    // Beyond a reduced horizon nothing binds and no cost accrues.
    return {1.0, 0.0, 0, 0, false};
  }
  const double th = problem.effective_horizon;
  if (contains(problem.constraint, th, x)) return {0.0, 0.0, 0, 0, false};
  return {std::exp(-0.5 * problem.costs.terminal_cost(x)), 0.0, 0, 0, false};
}

void validate_grid(const ProblemSpec& problem, double t, const TimeGrid& grid) {
  if (std::fabs(grid.t_start() - t) > kTimeTol)
    throw OutOfRange("estimate_u: grid must start at the query time");
  if (std::fabs(grid.t_end() - problem.effective_horizon) > kTimeTol)
    throw OutOfRange("estimate_u: grid must end at the problem horizon");
}

std::vector<std::uint64_t> point_key(double t, std::span<const double> x) {
  std::vector<std::uint64_t> key;
  key.reserve(x.size() + 1);
  key.push_back(std::bit_cast<std::uint64_t>(t));
  for (double xi : x) key.push_back(std::bit_cast<std::uint64_t>(xi));
  return key;
}

}  // namespace

Estimate reduce_samples(std::span<const double> values,
                        std::span<const unsigned char> valid) {
  const std::size_t n = values.size();
  std::size_t n_valid = 0;
  for (unsigned char v : valid) n_valid += v;
  if (n_valid == 0)
    throw AllPathsNonFinite("batch reduction: every path hit a non-finite state");

  std::vector<double> squares(n);
  for (std::size_t i = 0; i < n; ++i) squares[i] = values[i] * values[i];
  const double sum = pairwise_sum(values);
  const double sumsq = pairwise_sum(squares);

  Estimate est;
  est.n_paths = n_valid;
  est.n_nonfinite = n - n_valid;
  est.warning_nonfinite =
      static_cast<double>(est.n_nonfinite) >
      kNonFiniteWarnFraction * static_cast<double>(n);
  est.mean = sum / static_cast<double>(n_valid);
  if (n_valid > 1) {
    const double var =
        std::max(0.0, (sumsq - static_cast<double>(n_valid) * est.mean *
                                   est.mean)) /
        static_cast<double>(n_valid - 1);
    est.std_error = std::sqrt(var / static_cast<double>(n_valid));
  }
  return est;
}

CostSpec CostSpec::zero() { return constants(0.0, 0.0); }

CostSpec CostSpec::constants(double f_value, double g_value) {
  CostSpec c;
  c.running_cost = [f_value](double, std::span<const double>) {
    return f_value;
  };
  c.terminal_cost = [g_value](std::span<const double>) { return g_value; };
  return c;
}

Estimate estimate_u(const ProblemSpec& problem, double t,
                    std::span<const double> x, std::size_t n_paths,
                    const TimeGrid& grid, std::uint64_t master_seed,
                    const EstimatorOptions& opts) {
  if (x.size() != problem.field.dim_state)
    throw DimensionMismatch("estimate_u: state has wrong length");
  if (n_paths == 0) throw OutOfRange("estimate_u: n_paths must be >= 1");
  if (t > problem.horizon + kTimeTol)
    throw OutOfRange("estimate_u: query time beyond the horizon");
  if (t >= problem.effective_horizon - kTimeTol)
    return exact_terminal_estimate(problem, t, x);
  validate_grid(problem, t, grid);

  std::vector<double> weights(n_paths, 0.0);
  std::vector<unsigned char> valid(n_paths, 0);
  const std::vector<double> x0(x.begin(), x.end());
  parallel_chunks(n_paths, opts.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const NoiseStream stream(master_seed, opts.path_index_base + p);
      const PathWeight w =
          killed_weight(problem, x0, grid, stream, opts.use_bridge);
      weights[p] = w.nonfinite ? 0.0 : w.weight;
      valid[p] = w.nonfinite ? 0 : 1;
    }
  });
  return reduce_samples(weights, valid);
}

std::vector<GridPointEstimate> estimate_u_grid(
    const ProblemSpec& problem,
    std::span<const std::pair<double, std::vector<double>>> points,
    std::size_t n_paths, const TimeGrid& grid_template,
    std::uint64_t master_seed, const EstimatorOptions& opts) {
  std::vector<GridPointEstimate> out(points.size());
  std::map<std::vector<std::uint64_t>, std::uint64_t> slots;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& [t, x] = points[i];
    const auto key = point_key(t, x);
    auto [it, fresh] = slots.emplace(key, slots.size());
    EstimatorOptions point_opts = opts;
    point_opts.path_index_base =
        opts.path_index_base + it->second * static_cast<std::uint64_t>(n_paths);
    try {
      if (t >= problem.effective_horizon - kTimeTol) {
        out[i].estimate = estimate_u(problem, t, x, n_paths, grid_template,
                                     master_seed, point_opts);
      } else {
        const TimeGrid grid = problem.make_grid(t, grid_template.dt());
        out[i].estimate =
            estimate_u(problem, t, x, n_paths, grid, master_seed, point_opts);
      }
    } catch (const Error& err) {
      out[i].error = err.what();
    }
    (void)fresh;
  }
  return out;
}

GradientEstimate estimate_grad_u(const ProblemSpec& problem, double t,
                                 std::span<const double> x,
                                 std::span<const double> h,
                                 std::size_t n_paths, const TimeGrid& grid,
                                 std::uint64_t master_seed,
                                 const EstimatorOptions& opts) {
  const std::size_t d = problem.field.dim_state;
  if (x.size() != d || h.size() != d)
    throw DimensionMismatch("estimate_grad_u: state/step have wrong length");
  if (n_paths == 0) throw OutOfRange("estimate_grad_u: n_paths must be >= 1");
  validate_grid(problem, t, grid);

  GradientEstimate result;
  result.gradient.assign(d, 0.0);
  result.std_error.assign(d, 0.0);
  result.n_paths = n_paths;

  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < d; ++i) {
    if (!(h[i] > 0.0))
      throw OutOfRange("estimate_grad_u: steps must be positive");
    for (double sgn : {1.0, -1.0}) {
      probe[i] = x[i] + sgn * h[i];
      if (contains(problem.constraint, t, probe))
        throw PointOutsideC("estimate_grad_u: probe point lies in D");
    }
    probe[i] = x[i];
  }

  std::vector<double> diffs(n_paths);
  std::vector<unsigned char> valid(n_paths);
  for (std::size_t i = 0; i < d; ++i) {
    std::vector<double> xp(x.begin(), x.end()), xm(x.begin(), x.end());
    xp[i] += h[i];
    xm[i] -= h[i];
    parallel_chunks(n_paths, opts.workers, [&](std::size_t b, std::size_t e) {
      for (std::size_t p = b; p < e; ++p) {
        const NoiseStream stream(master_seed, opts.path_index_base + p);
        const PathWeight wp =
            killed_weight(problem, xp, grid, stream, opts.use_bridge);
        const PathWeight wm =
            killed_weight(problem, xm, grid, stream, opts.use_bridge);
        const bool bad = wp.nonfinite || wm.nonfinite;
        diffs[p] = bad ? 0.0 : wp.weight - wm.weight;
        valid[p] = bad ? 0 : 1;
      }
    });
    const Estimate diff = reduce_samples(diffs, valid);
    result.gradient[i] = diff.mean / (2.0 * h[i]);
    result.std_error[i] = diff.std_error / (2.0 * h[i]);
    result.n_nonfinite += diff.n_nonfinite;
  }
  return result;
}

double default_fd_step(const ProblemSpec& problem, double t) {
  const double remaining = std::max(0.0, problem.effective_horizon - t);
  return std::max(1e-3, 1e-2 * std::sqrt(remaining));
}

}  // namespace lqsc

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

#include "lqsc/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lqsc/errors.hpp"
#include "lqsc/parallel.hpp"

namespace lqsc {

namespace {

struct Derivatives {
  double value = 0.0;
  double time_deriv = 0.0;
  std::vector<double> grad;
  std::vector<double> hess;  // d x d row-major
};

// Central differences of a scalar field; `admissible` rejects probe values
// that indicate the probe left the survival set.
Derivatives central_derivatives(const ScalarField& w, double t,
                                std::span<const double> x, double h_t,
                                double h_x,
                                const std::function<bool(double)>& admissible) {
  const std::size_t d = x.size();
  Derivatives out;
  out.grad.assign(d, 0.0);
  out.hess.assign(d * d, 0.0);

  auto eval = [&](double tt, std::span<const double> xx) {
    const double val = w(tt, xx);
    if (!admissible(val))
      throw ProbeOutsideC("residual: finite-difference probe left the survival set");
    return val;
  };

  out.value = eval(t, x);
  out.time_deriv = (eval(t + h_t, x) - eval(t - h_t, x)) / (2.0 * h_t);

  std::vector<double> probe(x.begin(), x.end());
  for (std::size_t i = 0; i < d; ++i) {
    probe[i] = x[i] + h_x;
    const double up = eval(t, probe);
    probe[i] = x[i] - h_x;
    const double dn = eval(t, probe);
    probe[i] = x[i];
    out.grad[i] = (up - dn) / (2.0 * h_x);
    out.hess[i * d + i] = (up - 2.0 * out.value + dn) / (h_x * h_x);
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      double corner[4];
      int c = 0;
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          probe[i] = x[i] + si * h_x;
          probe[j] = x[j] + sj * h_x;
          corner[c++] = eval(t, probe);
        }
      }
      probe[i] = x[i];
      probe[j] = x[j];
      const double mixed =
          (corner[0] - corner[1] - corner[2] + corner[3]) / (4.0 * h_x * h_x);
      out.hess[i * d + j] = mixed;
      out.hess[j * d + i] = mixed;
    }
  }
  return out;
}

ResidualReport assemble_residual(const CoefficientField& field,
                                 const Derivatives& der, double t,
                                 std::span<const double> x, double h_t,
                                 double h_x, bool quadratic, double cost_term) {
  const std::size_t d = field.dim_state;
  const std::size_t dn = field.dim_noise;
  std::vector<double> mu(d), sig(d * dn);
  field.drift(t, x, mu);
  field.dispersion(t, x, sig);

  double generator = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    generator += mu[i] * der.grad[i];
    for (std::size_t j = 0; j < d; ++j) {
      double a_ij = 0.0;  // (sigma sigma^T)_ij
      for (std::size_t k = 0; k < dn; ++k)
        a_ij += sig[i * dn + k] * sig[j * dn + k];
      generator += 0.5 * a_ij * der.hess[i * d + j];
    }
  }

  double quad = 0.0;
  if (quadratic) {
    for (std::size_t k = 0; k < dn; ++k) {
      double sg = 0.0;
      for (std::size_t i = 0; i < d; ++i) sg += sig[i * dn + k] * der.grad[i];
      quad -= 0.25 * sg * sg;
    }
  }

  ResidualReport rep;
  rep.t = t;
  rep.x.assign(x.begin(), x.end());
  rep.h_t = h_t;
  rep.h_x = h_x;
  rep.time_term = der.time_deriv;
  rep.generator_term = generator;
  rep.quadratic_term = quad;
  rep.cost_term = cost_term;
  rep.residual = rep.time_term + rep.generator_term + rep.quadratic_term +
                 rep.cost_term;
  return rep;
}

}  // namespace

ResidualReport hjb_residual(const ScalarField& v, const CoefficientField& field,
                            const ScalarField& f, double t,
                            std::span<const double> x, double h_t,
                            double h_x) {
  const auto der = central_derivatives(
      v, t, x, h_t, h_x, [](double val) { return std::isfinite(val); });
  return assemble_residual(field, der, t, x, h_t, h_x, /*quadratic=*/true,
                           f(t, x));
}

ResidualReport pde_residual_u(const ScalarField& u,
                              const CoefficientField& field,
                              const ScalarField& f, double t,
                              std::span<const double> x, double h_t,
                              double h_x) {
  const auto der = central_derivatives(
      u, t, x, h_t, h_x,
      [](double val) { return std::isfinite(val) && val > 0.0; });
  return assemble_residual(field, der, t, x, h_t, h_x, /*quadratic=*/false,
                           -0.5 * f(t, x) * der.value);
}

CostReport cost_of_policy(const ProblemSpec& problem,
                          const FeedbackPolicy& policy,
                          const std::string& name, double t,
                          std::span<const double> x, std::size_t n_paths,
                          const TimeGrid& grid, std::uint64_t master_seed,
                          const EstimatorOptions& opts) {
  if (contains(problem.constraint, t, x))
    throw PointOutsideC("cost_of_policy: start point lies in D");
  if (n_paths == 0) throw OutOfRange("cost_of_policy: n_paths must be >= 1");

  const ControlFn control = policy.as_control_fn();
  const std::uint64_t clamps_before = policy.clamp_activations();
  std::vector<double> costs(n_paths, 0.0);
  std::vector<unsigned char> valid(n_paths, 0);
  std::vector<unsigned char> violated(n_paths, 0);
  const std::vector<double> x0(x.begin(), x.end());

  parallel_chunks(n_paths, opts.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const NoiseStream stream(master_seed, opts.path_index_base + p);
      const PathSample path =
          simulate_controlled(problem.field, control, x0, grid, stream);
      if (path.nonfinite) continue;
      double c = path.control_energy_integral;
      const std::size_t n = grid.n_steps();
      for (std::size_t k = 0; k < n; ++k)
        c += problem.costs.running_cost(grid.point(k), path.state(k)) *
             grid.step_len(k);
      c += problem.costs.terminal_cost(path.state(n));
      if (!std::isfinite(c)) continue;
      costs[p] = c;
      valid[p] = 1;
      // Violations are counted on grid points only: the bridge crossing law
      // describes the uncontrolled dynamics, not the controlled one.
      const KillReport kill =
          detect_kill(problem.constraint, problem.field, path, stream,
                      /*use_bridge=*/false);
      violated[p] = kill.killed ? 1 : 0;
    }
  });

  CostReport rep;
  rep.policy_name = name;
  rep.start_t = t;
  rep.start_x.assign(x.begin(), x.end());
  rep.cost = reduce_samples(costs, valid);
  std::size_t n_violated = 0;
  for (std::size_t p = 0; p < n_paths; ++p) n_violated += violated[p];
  rep.violation_fraction =
      static_cast<double>(n_violated) / static_cast<double>(rep.cost.n_paths);
  rep.clamp_activations = policy.clamp_activations() - clamps_before;
  rep.inadmissible = n_violated > 0;
  return rep;
}

ThetaReport theta_martingale_check(const ProblemSpec& problem,
                                   const ClosedFormSolution& sol, double t,
                                   std::span<const double> x,
                                   std::span<const double> checkpoints,
                                   std::size_t n_paths, const TimeGrid& grid,
                                   std::uint64_t master_seed,
                                   const EstimatorOptions& opts) {
  if (contains(problem.constraint, t, x))
    throw PointOutsideC("theta_martingale_check: start point lies in D");

  const std::size_t n_cp = checkpoints.size();
  std::vector<std::size_t> cp_index(n_cp);
  for (std::size_t c = 0; c < n_cp; ++c) {
    const double s = checkpoints[c];
    if (!(s > t) || !(s < problem.effective_horizon))
      throw OutOfRange("theta_martingale_check: checkpoints must lie in (t, T)");
    cp_index[c] = static_cast<std::size_t>(
        std::llround((s - grid.t_start()) / grid.dt()));
    cp_index[c] = std::min(cp_index[c], grid.n_steps());
  }

  std::vector<double> theta(n_cp * n_paths, 0.0);
  std::vector<unsigned char> valid(n_paths, 0);
  const std::vector<double> x0(x.begin(), x.end());

  parallel_chunks(n_paths, opts.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const NoiseStream stream(master_seed, opts.path_index_base + p);
      const PathSample path =
          simulate_uncontrolled(problem.field, x0, grid, stream);
      if (path.nonfinite) continue;
      valid[p] = 1;
      const KillReport kill = detect_kill(problem.constraint, problem.field,
                                          path, stream, opts.use_bridge);
      const std::size_t kill_at =
          kill.killed ? *kill.kill_index : grid.n_steps() + 1;
      double cost = 0.0;
      std::size_t k = 0;
      for (std::size_t c = 0; c < n_cp; ++c) {
        const std::size_t cp = cp_index[c];
        if (kill_at <= cp) {
          // Stopped in D (or on its boundary for a bridge hit): u vanishes.
          theta[c * n_paths + p] = 0.0;
          continue;
        }
        for (; k < cp; ++k)
          cost += problem.costs.running_cost(grid.point(k), path.state(k)) *
                  grid.step_len(k);
        theta[c * n_paths + p] =
            std::exp(-0.5 * cost) * sol.u(grid.point(cp), path.state(cp));
      }
    }
  });

  ThetaReport rep;
  rep.reference_u = sol.u(t, x);
  rep.checkpoint_times.resize(n_cp);
  rep.estimates.resize(n_cp);
  for (std::size_t c = 0; c < n_cp; ++c) {
    rep.checkpoint_times[c] = grid.point(cp_index[c]);
    rep.estimates[c] = reduce_samples(
        {theta.data() + c * n_paths, n_paths}, valid);
  }
  return rep;
}

double ks_distance_weighted(std::vector<double> a_values,
                            std::vector<double> a_weights,
                            std::vector<double> b_values) {
  if (a_values.size() != a_weights.size())
    throw DimensionMismatch("ks_distance_weighted: values/weights mismatch");
  if (a_values.empty() || b_values.empty())
    throw OutOfRange("ks_distance_weighted: empty sample");

  std::vector<std::size_t> order(a_values.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return a_values[i] < a_values[j];
  });
  double total = 0.0;
  for (double w : a_weights) total += w;
  std::sort(b_values.begin(), b_values.end());

  const std::size_t na = a_values.size(), nb = b_values.size();
  std::size_t i = 0, j = 0;
  double acc_a = 0.0, d = 0.0;
  while (i < na || j < nb) {
    const double va = i < na ? a_values[order[i]]
                             : std::numeric_limits<double>::infinity();
    const double vb =
        j < nb ? b_values[j] : std::numeric_limits<double>::infinity();
    const double v = std::min(va, vb);
    while (i < na && a_values[order[i]] <= v) acc_a += a_weights[order[i++]];
    while (j < nb && b_values[j] <= v) ++j;
    d = std::max(d, std::fabs(acc_a / total -
                              static_cast<double>(j) / static_cast<double>(nb)));
  }
  return d;
}

HTransformReport htransform_law_check(const ProblemSpec& problem,
                                      const ClosedFormSolution& sol, double t,
                                      std::span<const double> x, double s,
                                      std::size_t n_paths, const TimeGrid& grid,
                                      std::uint64_t master_seed,
                                      double clamp_max, double ks_threshold,
                                      const EstimatorOptions& opts) {
  if (contains(problem.constraint, t, x))
    throw PointOutsideC("htransform_law_check: start point lies in D");
  if (!(s > t) || !(s < problem.effective_horizon))
    throw OutOfRange("htransform_law_check: s must lie in (t, T)");
  const std::size_t cp = std::min(
      static_cast<std::size_t>(std::llround((s - grid.t_start()) / grid.dt())),
      grid.n_steps());
  const std::size_t n_grid = grid.n_steps();
  const std::vector<double> x0(x.begin(), x.end());

  // Ensemble A: uncontrolled, weighted by the terminal martingale value.
  std::vector<double> a_values(n_paths, 0.0), a_weights(n_paths, 0.0);
  std::vector<unsigned char> a_valid(n_paths, 0);
  parallel_chunks(n_paths, opts.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const NoiseStream stream(master_seed, opts.path_index_base + p);
      const PathSample path =
          simulate_uncontrolled(problem.field, x0, grid, stream);
      if (path.nonfinite) continue;
      a_valid[p] = 1;
      a_values[p] = path.state(cp)[0];
      const KillReport kill = detect_kill(problem.constraint, problem.field,
                                          path, stream, opts.use_bridge);
      if (kill.killed) continue;  // zero weight
      double cost = 0.0;
      for (std::size_t k = 0; k < n_grid; ++k)
        cost += problem.costs.running_cost(grid.point(k), path.state(k)) *
                grid.step_len(k);
      cost += problem.costs.terminal_cost(path.state(n_grid));
      if (!std::isfinite(cost)) {
        a_valid[p] = 0;
        continue;
      }
      a_weights[p] = std::exp(-0.5 * cost);
    }
  });

  // Ensemble B: optimally controlled, frozen at the first discrete violation.
  FeedbackPolicy policy = clamp(policy_from_solution(sol), clamp_max);
  const ControlFn control = policy.as_control_fn();
  std::vector<double> b_values(n_paths, 0.0);
  std::vector<unsigned char> b_valid(n_paths, 0), b_violated(n_paths, 0);
  parallel_chunks(n_paths, opts.workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const NoiseStream stream(master_seed,
                               opts.path_index_base + n_paths + p);
      const PathSample path =
          simulate_controlled(problem.field, control, x0, grid, stream);
      if (path.nonfinite && path.valid_points() <= cp) continue;
      const KillReport kill = detect_kill(problem.constraint, problem.field,
                                          path, stream, /*use_bridge=*/false);
      std::size_t stop = cp;
      if (kill.killed && *kill.kill_index < cp) {
        stop = *kill.kill_index;
        b_violated[p] = 1;
      }
      b_values[p] = path.state(stop)[0];
      b_valid[p] = 1;
    }
  });

  std::vector<double> av, aw, bv;
  av.reserve(n_paths);
  aw.reserve(n_paths);
  bv.reserve(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    if (a_valid[p] && a_weights[p] > 0.0) {
      av.push_back(a_values[p]);
      aw.push_back(a_weights[p]);
    }
    if (b_valid[p]) bv.push_back(b_values[p]);
  }

  double wsum = 0.0, wsq = 0.0;
  for (double w : aw) {
    wsum += w;
    wsq += w * w;
  }
  HTransformReport rep;
  rep.effective_sample_size = wsq > 0.0 ? wsum * wsum / wsq : 0.0;
  if (rep.effective_sample_size < 100.0)
    throw DegenerateWeights(
        "htransform_law_check: weighted effective sample size below 100");
  rep.ks = ks_distance_weighted(std::move(av), std::move(aw), std::move(bv));
  rep.threshold = ks_threshold;
  rep.pass = rep.ks <= ks_threshold;
  std::size_t nviol = 0;
  for (unsigned char f : b_violated) nviol += f;
  rep.controlled_violations = nviol;
  rep.clamp_activations = policy.clamp_activations();
  return rep;
}

Estimate reflection_bruteforce_u(double x, double T_minus_t,
                                 std::size_t n_paths, double dt,
                                 std::uint64_t master_seed, unsigned workers) {
  if (!(x > 0.0)) throw OutOfRange("reflection_bruteforce_u: need x > 0");
  if (!(T_minus_t > 0.0) || !(dt > 0.0))
    throw OutOfRange("reflection_bruteforce_u: need positive span and dt");
  const std::size_t n =
      std::max<std::size_t>(1, static_cast<std::size_t>(
                                   std::ceil(T_minus_t / dt - 1e-9)));
  const double last = T_minus_t - static_cast<double>(n - 1) * dt;

  std::vector<double> hits(n_paths, 0.0);
  std::vector<unsigned char> valid(n_paths, 1);
  parallel_chunks(n_paths, workers, [&](std::size_t b, std::size_t e) {
    for (std::size_t p = b; p < e; ++p) {
      const NoiseStream stream(master_seed, p);
      double w = x;
      bool alive = true;
      for (std::size_t k = 0; k < n; ++k) {
        const double h = k + 1 == n ? last : dt;
        w += stream.normal(k) * std::sqrt(h);
        if (w <= 0.0) {
          alive = false;
          break;
        }
      }
      hits[p] = alive ? 1.0 : 0.0;
    }
  });
  return reduce_samples(hits, valid);
}

}  // namespace lqsc

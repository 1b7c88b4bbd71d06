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

#include "lqsc/policy.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "lqsc/errors.hpp"

namespace lqsc {

namespace {
constexpr double kTimeTol = 1e-12;
}

void FeedbackPolicy::eval(double t, std::span<const double> x,
                          std::span<double> out) const {
  control(t, x, out);
  if (!std::isfinite(clamp_max)) return;
  double norm2 = 0.0;
  for (double a : out) norm2 += a * a;
  const double norm = std::sqrt(norm2);
  if (norm > clamp_max) {
    const double scale = clamp_max / norm;
    for (auto& a : out) a *= scale;
    clamp_hits->fetch_add(1, std::memory_order_relaxed);
  }
}

ControlFn FeedbackPolicy::as_control_fn() const {
  return [policy = *this](double t, std::span<const double> x,
                          std::span<double> out) { policy.eval(t, x, out); };
}

FeedbackPolicy FeedbackPolicy::zero(std::size_t dim_noise) {
  FeedbackPolicy p;
  p.dim_noise = dim_noise;
  p.source = PolicySource::Zero;
  p.control = [](double, std::span<const double>, std::span<double> out) {
    for (auto& a : out) a = 0.0;
  };
  return p;
}

double value_from_u(double u_value) {
  if (!(u_value >= 0.0) || !(u_value <= 1.0))
    throw OutOfRange("value_from_u: u must lie in [0, 1]");
  if (u_value == 0.0) return std::numeric_limits<double>::infinity();
  return -2.0 * std::log(u_value);
}

ValueFunction value_function_from_solution(const ClosedFormSolution& sol) {
  return {sol.v, PolicySource::ClosedForm};
}

FeedbackPolicy alpha_star_closed_form(const ClosedFormSolution& sol,
                                      const CoefficientField& field) {
  FeedbackPolicy p;
  p.dim_noise = field.dim_noise;
  p.source = PolicySource::ClosedForm;
  const std::size_t d = field.dim_state;
  const std::size_t dn = field.dim_noise;
  p.control = [sol, field, d, dn](double t, std::span<const double> x,
                                  std::span<double> out) {
    if (t >= sol.control_horizon - kTimeTol) {
      for (auto& a : out) a = 0.0;
      return;
    }
    const double u = sol.u(t, x);
    if (!(u > 0.0)) {  // off the survival set the control vanishes
      for (auto& a : out) a = 0.0;
      return;
    }
    std::vector<double> grad(d), sig(d * dn);
    sol.grad_u(t, x, grad);
    field.dispersion(t, x, sig);
    for (std::size_t j = 0; j < dn; ++j) {
      double acc = 0.0;
      for (std::size_t i = 0; i < d; ++i) acc += sig[i * dn + j] * grad[i];
      out[j] = acc / u;
    }
  };
  return p;
}

FeedbackPolicy policy_from_solution(const ClosedFormSolution& sol) {
  FeedbackPolicy p;
  p.dim_noise = sol.dim_noise;
  p.source = PolicySource::ClosedForm;
  p.control = [alpha = sol.alpha_star](double t, std::span<const double> x,
                                       std::span<double> out) {
    alpha(t, x, out);
  };
  return p;
}

FeedbackPolicy clamp(const FeedbackPolicy& policy, double clamp_max) {
  if (!(clamp_max > 0.0)) throw OutOfRange("clamp: cap must be positive");
  FeedbackPolicy p = policy;
  p.clamp_max = clamp_max;
  p.clamp_hits = std::make_shared<std::atomic<std::uint64_t>>(0);
  return p;
}

// --- Monte Carlo policy ----------------------------------------------------

struct McPolicy::Cache {
  std::mutex mu;
  std::map<std::vector<std::int64_t>, Eval> nodes;
};

McPolicy::McPolicy(ProblemSpec problem, McPolicyConfig config)
    : problem_(std::move(problem)), config_(config),
      cache_(std::make_shared<Cache>()) {}

McPolicy::Eval McPolicy::control_at(double t, std::span<const double> x) const {
  return node_value(t, x);
}

McPolicy::Eval McPolicy::node_value(double t, std::span<const double> x) const {
  const std::size_t d = problem_.field.dim_state;
  const std::size_t dn = problem_.field.dim_noise;
  Eval eval;
  eval.control.assign(dn, 0.0);
  if (t >= problem_.effective_horizon - kTimeTol) return eval;
  if (contains(problem_.constraint, t, x)) return eval;

  EstimatorOptions opts;
  opts.use_bridge = config_.use_bridge;
  opts.workers = config_.workers;
  const TimeGrid grid = problem_.make_grid(t, config_.dt);
  const Estimate u_hat = estimate_u(problem_, t, x, config_.n_paths, grid,
                                    config_.master_seed, opts);
  if (u_hat.mean < config_.u_floor) {
    eval.degenerate = true;
    return eval;
  }
  const double h0 =
      config_.fd_step ? *config_.fd_step : default_fd_step(problem_, t);
  std::vector<double> h(d, h0);
  const GradientEstimate grad = estimate_grad_u(
      problem_, t, x, h, config_.n_paths, grid, config_.master_seed, opts);
  std::vector<double> sig(d * dn);
  problem_.field.dispersion(t, x, sig);
  for (std::size_t j = 0; j < dn; ++j) {
    double acc = 0.0;
    for (std::size_t i = 0; i < d; ++i) acc += sig[i * dn + j] * grad.gradient[i];
    eval.control[j] = acc / u_hat.mean;
  }
  return eval;
}

McPolicy::Eval McPolicy::interpolated(double t,
                                      std::span<const double> x) const {
  const std::size_t d = problem_.field.dim_state;
  const std::size_t dn = problem_.field.dim_noise;
  if (t >= problem_.effective_horizon - kTimeTol) return {std::vector<double>(dn, 0.0), false};

  // Cell corner indices and interpolation weights per axis (time axis first).
  std::vector<std::int64_t> base(d + 1);
  std::vector<double> frac(d + 1);
  base[0] = static_cast<std::int64_t>(std::floor(t / config_.lattice_dt));
  frac[0] = t / config_.lattice_dt - static_cast<double>(base[0]);
  for (std::size_t i = 0; i < d; ++i) {
    base[i + 1] = static_cast<std::int64_t>(std::floor(x[i] / config_.lattice_dx));
    frac[i + 1] = x[i] / config_.lattice_dx - static_cast<double>(base[i + 1]);
  }

  Eval out;
  out.control.assign(dn, 0.0);
  std::vector<double> corner_x(d);
  for (std::size_t corner = 0; corner < (std::size_t{1} << (d + 1)); ++corner) {
    double weight = 1.0;
    std::vector<std::int64_t> key(d + 1);
    for (std::size_t axis = 0; axis <= d; ++axis) {
      const bool hi = (corner >> axis) & 1;
      key[axis] = base[axis] + (hi ? 1 : 0);
      weight *= hi ? frac[axis] : 1.0 - frac[axis];
    }
    if (weight == 0.0) continue;
    const double node_t =
        std::min(static_cast<double>(key[0]) * config_.lattice_dt,
                 problem_.effective_horizon);
    for (std::size_t i = 0; i < d; ++i)
      corner_x[i] = static_cast<double>(key[i + 1]) * config_.lattice_dx;

    Eval node;
    {
      std::lock_guard<std::mutex> lock(cache_->mu);
      auto it = cache_->nodes.find(key);
      if (it != cache_->nodes.end()) node = it->second;
    }
    if (node.control.empty()) {
      node = node_value(node_t, corner_x);
      std::lock_guard<std::mutex> lock(cache_->mu);
      cache_->nodes.emplace(key, node);
    }
    out.degenerate = out.degenerate || node.degenerate;
    for (std::size_t j = 0; j < dn; ++j)
      out.control[j] += weight * node.control[j];
  }
  return out;
}

FeedbackPolicy McPolicy::as_policy() const {
  FeedbackPolicy p;
  p.dim_noise = problem_.field.dim_noise;
  p.source = PolicySource::MonteCarloFD;
  if (config_.memoize) {
    p.control = [self = *this](double t, std::span<const double> x,
                               std::span<double> out) {
      const Eval e = self.interpolated(t, x);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = e.control[j];
    };
  } else {
    p.control = [self = *this](double t, std::span<const double> x,
                               std::span<double> out) {
      const Eval e = self.node_value(t, x);
      for (std::size_t j = 0; j < out.size(); ++j) out[j] = e.control[j];
    };
  }
  return p;
}

}  // namespace lqsc

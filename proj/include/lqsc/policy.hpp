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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>

#include "lqsc/estimator.hpp"
#include "lqsc/oracles.hpp"

namespace lqsc {

enum class PolicySource { ClosedForm, MonteCarloFD, Zero, UserSupplied };

// A measurable feedback map (t,x) -> control in R^{d'}. Evaluation rescales
// any control whose Euclidean norm exceeds clamp_max back onto that norm,
// preserving direction; the optimal control blows up at the survival-set
// boundary and an explicit Euler step with unbounded drift overshoots, so
// simulations always run clamped. clamp_hits counts rescaled evaluations.
struct FeedbackPolicy {
  ControlFn control;
  double clamp_max = std::numeric_limits<double>::infinity();
  PolicySource source = PolicySource::Zero;
  std::size_t dim_noise = 1;
  std::shared_ptr<std::atomic<std::uint64_t>> clamp_hits =
      std::make_shared<std::atomic<std::uint64_t>>(0);

  void eval(double t, std::span<const double> x, std::span<double> out) const;

  // Adapter for the integrator; the returned callable applies the clamp.
  ControlFn as_control_fn() const;

  std::uint64_t clamp_activations() const { return clamp_hits->load(); }

  static FeedbackPolicy zero(std::size_t dim_noise);
};

// v = -2 ln u, mapping a killed-expectation value to the control value.
// Returns +infinity at u = 0 (the forbidden set); throws OutOfRange outside
// [0, 1].
double value_from_u(double u_value);

// The value function as an evaluatable map, +infinity on the forbidden set.
struct ValueFunction {
  std::function<double(double, std::span<const double>)> evaluate;
  PolicySource source = PolicySource::ClosedForm;
};

ValueFunction value_function_from_solution(const ClosedFormSolution& sol);

// Optimal feedback assembled from a differentiable u:
//   control = sigma^T grad u / u  on the survival set before the control
// horizon, and 0 elsewhere. (Equivalently -1/2 sigma^T grad v; for the
// killed-Brownian-motion examples this evaluates to the positive
// density/distribution ratios of their printed controls.)
FeedbackPolicy alpha_star_closed_form(const ClosedFormSolution& sol,
                                      const CoefficientField& field);

// The solution's own printed control as a policy; algebraically equal to
// alpha_star_closed_form but numerically stable deep in the tails, so
// simulations use this form.
FeedbackPolicy policy_from_solution(const ClosedFormSolution& sol);

// Copy of `policy` with the given norm cap.
FeedbackPolicy clamp(const FeedbackPolicy& policy, double clamp_max);

struct McPolicyConfig {
  std::size_t n_paths = 20000;
  std::uint64_t master_seed = 1234;
  double dt = 0.005;
  // Below this estimated u the control is returned as zero and flagged: the
  // ratio grad u / u is noise-dominated there, and the exact optimal path
  // never reaches u = 0, so the floor only fires under discretization error.
  double u_floor = 1e-6;
  std::optional<double> fd_step;  // default: max(1e-3, 1e-2 sqrt(T-t))
  double lattice_dt = 0.005;
  double lattice_dx = 0.05;
  bool memoize = true;
  bool use_bridge = true;
  unsigned workers = 1;
};

// Feedback control estimated on demand from estimate_u / estimate_grad_u.
// Node values are memoized on a (t,x) lattice and interpolated multilinearly
// in between; each node value is a pure function of the node coordinates and
// the configuration, so results do not depend on query or thread order.
class McPolicy {
 public:
  McPolicy(ProblemSpec problem, McPolicyConfig config);

  struct Eval {
    std::vector<double> control;
    bool degenerate = false;  // u fell below u_floor
  };

  // Exact (un-interpolated) control at a point.
  Eval control_at(double t, std::span<const double> x) const;

  // Lattice-interpolating policy adapter.
  FeedbackPolicy as_policy() const;

  const ProblemSpec& problem() const { return problem_; }

 private:
  struct Cache;
  Eval node_value(double t, std::span<const double> x) const;
  Eval interpolated(double t, std::span<const double> x) const;

  ProblemSpec problem_;
  McPolicyConfig config_;
  std::shared_ptr<Cache> cache_;
};

}  // namespace lqsc

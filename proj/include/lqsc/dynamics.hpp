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
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lqsc/rng.hpp"

namespace lqsc {

// Drift b(t,x) written into a length-d span.
using DriftFn =
    std::function<void(double, std::span<const double>, std::span<double>)>;
// Dispersion s(t,x) written row-major into a d x d' span.
using DispersionFn =
    std::function<void(double, std::span<const double>, std::span<double>)>;
// Feedback control a(t,x) written into a length-d' span.
using ControlFn =
    std::function<void(double, std::span<const double>, std::span<double>)>;

// The drift/dispersion pair defining both the uncontrolled and the controlled
// dynamics. Coefficients must return finite values of the declared shapes for
// every finite input; local Lipschitz continuity and linear growth are the
// caller's obligation (the integrator cannot check them).
struct CoefficientField {
  std::size_t dim_state = 1;
  std::size_t dim_noise = 1;
  DriftFn drift;
  DispersionFn dispersion;

  // Convenience constructor for scalar problems (d = d' = 1).
  static CoefficientField scalar(std::function<double(double, double)> mu,
                                 std::function<double(double, double)> sigma);
};

// Uniform time grid on [t_start, t_end] with the final point clamped so the
// grid always contains t_end exactly. The last step may be shorter than dt.
class TimeGrid {
 public:
  TimeGrid(double t_start, double t_end, double dt);

  double t_start() const { return t_start_; }
  double t_end() const { return t_end_; }
  double dt() const { return dt_; }
  std::size_t n_steps() const { return n_steps_; }

  double point(std::size_t k) const;
  // point(k+1) - point(k); equals dt except possibly for the final step.
  double step_len(std::size_t k) const { return point(k + 1) - point(k); }

 private:
  double t_start_;
  double t_end_;
  double dt_;
  std::size_t n_steps_;
};

// One simulated trajectory. States are stored row-major, (n_steps+1) x d.
// Kill fields are filled by lqsc::detect_kill, cost fields by the estimator
// and the controlled integrator. A path whose state leaves the representable
// range is flagged non-finite and truncated; batch estimators count such
// paths instead of aborting (coefficient blow-up near the boundary must not
// poison a whole batch).
struct PathSample {
  TimeGrid grid;
  std::size_t dim_state = 1;
  std::vector<double> states;
  bool killed = false;
  std::optional<std::size_t> kill_index;
  double running_cost_integral = 0.0;
  double control_energy_integral = 0.0;
  bool nonfinite = false;
  std::optional<std::size_t> nonfinite_index;

  std::span<const double> state(std::size_t k) const {
    return {states.data() + k * dim_state, dim_state};
  }
  // Number of grid indices with valid states (stops at the non-finite point).
  std::size_t valid_points() const {
    return nonfinite ? *nonfinite_index : grid.n_steps() + 1;
  }
};

// Euler-Maruyama integration of dZ = mu dt + sigma dW from (grid.t_start, x0).
// Increments for step k are the stream normals at flat indices
// k*dim_noise + c scaled by sqrt(step_len(k)), so two simulations sharing a
// stream share their noise exactly (common random numbers).
PathSample simulate_uncontrolled(const CoefficientField& field,
                                 std::span<const double> x0,
                                 const TimeGrid& grid,
                                 const NoiseStream& stream);

// Same scheme with drift mu + sigma*a, a = control(t_k, x_k). Accumulates
// |a|^2 by the left-rectangle rule into control_energy_integral. With
// control == nullptr (or a zero control) the output coincides bit-for-bit
// with simulate_uncontrolled on the same stream.
PathSample simulate_controlled(const CoefficientField& field,
                               const ControlFn& control,
                               std::span<const double> x0,
                               const TimeGrid& grid,
                               const NoiseStream& stream);

}  // namespace lqsc

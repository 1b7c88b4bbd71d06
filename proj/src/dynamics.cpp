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

#include "lqsc/dynamics.hpp"

#include <cmath>
#include <limits>

#include "lqsc/errors.hpp"

namespace lqsc {

CoefficientField CoefficientField::scalar(
    std::function<double(double, double)> mu,
    std::function<double(double, double)> sigma) {
  CoefficientField f;
  f.dim_state = 1;
  f.dim_noise = 1;
  f.drift = [mu = std::move(mu)](double t, std::span<const double> x,
                                 std::span<double> out) { out[0] = mu(t, x[0]); };
  f.dispersion = [sigma = std::move(sigma)](double t, std::span<const double> x,
                                            std::span<double> out) {
    out[0] = sigma(t, x[0]);
  };
  return f;
}

TimeGrid::TimeGrid(double t_start, double t_end, double dt)
    : t_start_(t_start), t_end_(t_end), dt_(dt) {
  if (!(dt > 0.0)) throw OutOfRange("TimeGrid: dt must be positive");
  if (!(t_start < t_end))
    throw OutOfRange("TimeGrid: t_start must precede t_end");
  // Small backoff so an integral span/dt does not gain a spurious step.
  const double raw = (t_end - t_start) / dt;
  n_steps_ = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  if (n_steps_ == 0) n_steps_ = 1;
}

double TimeGrid::point(std::size_t k) const {
  if (k >= n_steps_) return t_end_;
  const double t = t_start_ + static_cast<double>(k) * dt_;
  return t < t_end_ ? t : t_end_;
}

namespace {

bool all_finite(std::span<const double> xs) {
  for (double v : xs) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

PathSample integrate(const CoefficientField& field, const ControlFn* control,
                     std::span<const double> x0, const TimeGrid& grid,
                     const NoiseStream& stream) {
  const std::size_t d = field.dim_state;
  const std::size_t dn = field.dim_noise;
  if (x0.size() != d)
    throw DimensionMismatch("simulate: start state has wrong length");

  PathSample path{grid, d, {}, false, std::nullopt, 0.0, 0.0, false,
                  std::nullopt};
  const std::size_t n = grid.n_steps();
  path.states.assign((n + 1) * d, std::numeric_limits<double>::quiet_NaN());
  for (std::size_t i = 0; i < d; ++i) path.states[i] = x0[i];

  std::vector<double> mu(d), sig(d * dn), ctrl(control ? dn : 0);
  std::uint64_t normal_index = 0;
  std::array<double, 2> zpair{};

  for (std::size_t k = 0; k < n; ++k) {
    const double t = grid.point(k);
    const double h = grid.step_len(k);
    const double sqrt_h = std::sqrt(h);
    const std::span<const double> xk{path.states.data() + k * d, d};
    double* next = path.states.data() + (k + 1) * d;

    field.drift(t, xk, mu);
    field.dispersion(t, xk, sig);
    if (control) {
      (*control)(t, xk, ctrl);
      double a2 = 0.0;
      for (std::size_t j = 0; j < dn; ++j) a2 += ctrl[j] * ctrl[j];
      path.control_energy_integral += a2 * h;
      for (std::size_t i = 0; i < d; ++i) {
        double sa = 0.0;
        for (std::size_t j = 0; j < dn; ++j) sa += sig[i * dn + j] * ctrl[j];
        mu[i] += sa;
      }
    }

    for (std::size_t i = 0; i < d; ++i) next[i] = xk[i] + mu[i] * h;
    for (std::size_t j = 0; j < dn; ++j) {
      const std::uint64_t idx = normal_index++;
      if ((idx & 1) == 0) zpair = stream.normal_pair(idx >> 1);
      const double dw = zpair[idx & 1] * sqrt_h;
      for (std::size_t i = 0; i < d; ++i) next[i] += sig[i * dn + j] * dw;
    }

    if (!all_finite({next, d})) {
      path.nonfinite = true;
      path.nonfinite_index = k + 1;
      return path;
    }
  }
  return path;
}

}  // namespace

PathSample simulate_uncontrolled(const CoefficientField& field,
                                 std::span<const double> x0,
                                 const TimeGrid& grid,
                                 const NoiseStream& stream) {
  return integrate(field, nullptr, x0, grid, stream);
}

PathSample simulate_controlled(const CoefficientField& field,
                               const ControlFn& control,
                               std::span<const double> x0,
                               const TimeGrid& grid,
                               const NoiseStream& stream) {
  return integrate(field, control ? &control : nullptr, x0, grid, stream);
}

}  // namespace lqsc

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

namespace lqsc {

// Standard normal density.
double std_normal_pdf(double z);

// Standard normal distribution function, evaluated through the complementary
// error function; absolute error well below 1e-12 across the real line.
double std_normal_cdf(double x);

// Density/distribution ratio phi(z)/Phi(z), stable arbitrarily deep in the
// left tail where both factors underflow.
double mills_ratio(double z);

// Closed-form ground truth for one analytically solvable problem: the killed
// expectation u, its spatial gradient, the value v = -2 ln u (infinite on the
// forbidden set), and the printed optimal feedback control. All functions
// are pure. On a terminal/slab section the convention is closed: evaluation
// exactly on the section boundary returns the forbidden-side value u = 0.
struct ClosedFormSolution {
  std::function<double(double, std::span<const double>)> u;
  std::function<void(double, std::span<const double>, std::span<double>)>
      grad_u;
  std::function<double(double, std::span<const double>)> v;
  std::function<void(double, std::span<const double>, std::span<double>)>
      alpha_star;
  std::size_t dim_state = 1;
  std::size_t dim_noise = 1;
  double horizon = 1.0;
  // Time from which the control is identically zero (the slab time for slab
  // problems, otherwise the horizon).
  double control_horizon = 1.0;
};

// Brownian motion killed on the terminal half-line x <= 0:
//   u(t,x) = Phi(x/sqrt(T-t)),  u(T,x) = 1{x > 0}.
ClosedFormSolution example1_solution(double T);

// Brownian motion killed on the running half-line x <= 0:
//   u(t,x) = 2 Phi(x/sqrt(T-t)) - 1 for x > 0, and 0 otherwise.
ClosedFormSolution example2_solution(double T);

// Brownian motion forbidden from the box [x0, x1] at the single time t0:
// three-branch u; the problem reduces to the horizon t0, beyond which v = 0.
// Throws InvalidGeometry unless x0 < x1 and 0 < t0 < T.
ClosedFormSolution example3_solution(double T, double t0, double x0, double x1);

// Unconstrained problem with constant costs f == f_value, g == g_value:
//   u(t,x) = exp(-(f_value*(T-t) + g_value)/2), v = f_value*(T-t) + g_value,
// and zero control. Non-constant costs have no closed form here; callers fall
// back to the Monte Carlo estimator (signalled by nullopt).
std::optional<ClosedFormSolution> unconstrained_solution(
    double T, std::optional<double> f_value, std::optional<double> g_value);

}  // namespace lqsc

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

#include "lqsc/oracles.hpp"

#include <cmath>
#include <limits>

#include "lqsc/errors.hpp"

namespace lqsc {

namespace {

constexpr double kInvSqrt2Pi = 0.3989422804014326779399461;
constexpr double kTimeTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

double neg_two_log(double u) {
  if (u <= 0.0) return kInf;
  return -2.0 * std::log(u);
}

}  // namespace

double std_normal_pdf(double z) {
  return kInvSqrt2Pi * std::exp(-0.5 * z * z);
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

double mills_ratio(double z) {
  if (z < -30.0) {
    // Asymptotic expansion; both pdf and cdf underflow around z = -38.
    const double a = -z;
    return a + 1.0 / a;
  }
  return std_normal_pdf(z) / std_normal_cdf(z);
}

ClosedFormSolution example1_solution(double T) {
  if (!(T > 0.0)) throw InvalidGeometry("example1: horizon must be positive");
  ClosedFormSolution sol;
  sol.horizon = T;
  sol.control_horizon = T;

  sol.u = [T](double t, std::span<const double> x) {
    if (t >= T - kTimeTol) return x[0] > 0.0 ? 1.0 : 0.0;
    return std_normal_cdf(x[0] / std::sqrt(T - t));
  };
  sol.grad_u = [T](double t, std::span<const double> x, std::span<double> out) {
    if (t >= T - kTimeTol) {
      out[0] = 0.0;
      return;
    }
    const double s = std::sqrt(T - t);
    out[0] = std_normal_pdf(x[0] / s) / s;
  };
  sol.v = [u = sol.u](double t, std::span<const double> x) {
    return neg_two_log(u(t, x));
  };
  sol.alpha_star = [T](double t, std::span<const double> x,
                       std::span<double> out) {
    if (t >= T - kTimeTol) {
      out[0] = 0.0;
      return;
    }
    const double s = std::sqrt(T - t);
    out[0] = mills_ratio(x[0] / s) / s;
  };
  return sol;
}

ClosedFormSolution example2_solution(double T) {
  if (!(T > 0.0)) throw InvalidGeometry("example2: horizon must be positive");
  ClosedFormSolution sol;
  sol.horizon = T;
  sol.control_horizon = T;

  // 2*Phi(z) - 1 written through erf for full precision near the barrier.
  auto interior_u = [](double z) { return std::erf(z * M_SQRT1_2); };

  sol.u = [T, interior_u](double t, std::span<const double> x) {
    if (t >= T - kTimeTol) return x[0] > 0.0 ? 1.0 : 0.0;
    if (x[0] <= 0.0) return 0.0;
    return interior_u(x[0] / std::sqrt(T - t));
  };
  sol.grad_u = [T](double t, std::span<const double> x, std::span<double> out) {
    if (t >= T - kTimeTol || x[0] <= 0.0) {
      out[0] = 0.0;
      return;
    }
    const double s = std::sqrt(T - t);
    out[0] = 2.0 * std_normal_pdf(x[0] / s) / s;
  };
  sol.v = [u = sol.u](double t, std::span<const double> x) {
    return neg_two_log(u(t, x));
  };
  sol.alpha_star = [T, interior_u](double t, std::span<const double> x,
                                   std::span<double> out) {
    if (t >= T - kTimeTol || x[0] <= 0.0) {
      out[0] = 0.0;
      return;
    }
    const double s = std::sqrt(T - t);
    const double z = x[0] / s;
    out[0] = 2.0 * std_normal_pdf(z) / (interior_u(z) * s);
  };
  return sol;
}

ClosedFormSolution example3_solution(double T, double t0, double x0,
                                     double x1) {
  if (!(T > 0.0) || !(t0 > 0.0) || !(t0 < T))
    throw InvalidGeometry("example3: need 0 < t0 < T");
  if (!(x0 < x1)) throw InvalidGeometry("example3: need x0 < x1");
  ClosedFormSolution sol;
  sol.horizon = T;
  sol.control_horizon = t0;

  sol.u = [t0, x0, x1](double t, std::span<const double> x) {
    if (t > t0 + kTimeTol) return 1.0;
    if (t >= t0 - kTimeTol)
      return (x[0] >= x0 && x[0] <= x1) ? 0.0 : 1.0;
    const double s = std::sqrt(t0 - t);
    return std_normal_cdf((x[0] - x1) / s) + std_normal_cdf((x0 - x[0]) / s);
  };
  sol.grad_u = [t0, x0, x1](double t, std::span<const double> x,
                            std::span<double> out) {
    if (t >= t0 - kTimeTol) {
      out[0] = 0.0;
      return;
    }
    const double s = std::sqrt(t0 - t);
    out[0] = (std_normal_pdf((x[0] - x1) / s) - std_normal_pdf((x0 - x[0]) / s)) / s;
  };
  sol.v = [u = sol.u](double t, std::span<const double> x) {
    return neg_two_log(u(t, x));
  };
  sol.alpha_star = [t0, x0, x1](double t, std::span<const double> x,
                                std::span<double> out) {
    if (t >= t0 - kTimeTol) {
      out[0] = 0.0;
      return;
    }
    const double s = std::sqrt(t0 - t);
    const double a = (x[0] - x1) / s;  // distance to the upper exit
    const double b = (x0 - x[0]) / s;  // distance to the lower exit
    if (a < -30.0 && b < -30.0) {
      // Both exit probabilities underflow; the nearer exit dominates the
      // ratio and its Mills asymptote gives the drift direction.
      out[0] = (a >= b ? mills_ratio(a) : -mills_ratio(b)) / s;
      return;
    }
    out[0] = (std_normal_pdf(a) - std_normal_pdf(b)) /
             ((std_normal_cdf(a) + std_normal_cdf(b)) * s);
  };
  return sol;
}

std::optional<ClosedFormSolution> unconstrained_solution(
    double T, std::optional<double> f_value, std::optional<double> g_value) {
  if (!f_value || !g_value) return std::nullopt;
  const double f = *f_value;
  const double g = *g_value;
  ClosedFormSolution sol;
  sol.horizon = T;
  sol.control_horizon = T;
  sol.u = [T, f, g](double t, std::span<const double>) {
    return std::exp(-0.5 * (f * (T - t) + g));
  };
  sol.grad_u = [](double, std::span<const double>, std::span<double> out) {
    for (auto& o : out) o = 0.0;
  };
  sol.v = [T, f, g](double t, std::span<const double>) {
    return f * (T - t) + g;
  };
  sol.alpha_star = [](double, std::span<const double>, std::span<double> out) {
    for (auto& o : out) o = 0.0;
  };
  return sol;
}

}  // namespace lqsc

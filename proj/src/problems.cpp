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

#include "lqsc/problems.hpp"

#include "lqsc/errors.hpp"

namespace lqsc {

namespace {

CoefficientField standard_brownian() {
  return CoefficientField::scalar([](double, double) { return 0.0; },
                                  [](double, double) { return 1.0; });
}

double param_or(const std::map<std::string, double>& params,
                const std::string& key, double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

void reject_unknown(const std::map<std::string, double>& params,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, value] : params) {
    (void)value;
    bool ok = false;
    for (const char* k : known) ok = ok || key == k;
    if (!ok) throw ConfigError("unknown problem parameter: " + key);
  }
}

}  // namespace

BuiltinProblem make_builtin_problem(const std::string& name, double T,
                                    const std::map<std::string, double>& params) {
  if (!(T > 0.0)) throw ConfigError("problem horizon T must be positive");
  BuiltinProblem p;
  p.name = name;
  p.spec.field = standard_brownian();
  p.spec.costs = CostSpec::zero();
  p.spec.horizon = T;
  p.spec.effective_horizon = T;
  p.default_start_time = 0.0;

  if (name == "example1") {
    reject_unknown(params, {});
    p.spec.constraint = ConstraintSet::terminal_half_space(
        1, 0, 0.0, HalfSpaceSide::Below, T);
    p.solution = example1_solution(T);
    p.default_start_state = {-1.5};
  } else if (name == "example2") {
    reject_unknown(params, {});
    p.spec.constraint =
        ConstraintSet::running_half_space(1, 0, 0.0, HalfSpaceSide::Below);
    p.solution = example2_solution(T);
    p.default_start_state = {0.2};
  } else if (name == "example3") {
    reject_unknown(params, {"t0", "x0", "x1"});
    const double t0 = param_or(params, "t0", 0.2);
    const double x0 = param_or(params, "x0", -2.0);
    const double x1 = param_or(params, "x1", 2.0);
    p.spec.constraint = ConstraintSet::time_slab(1, t0, {x0}, {x1});
    // Costs vanish and nothing binds after t0, so the killed expectation
    // integrates only to t0.
    p.spec.effective_horizon = t0;
    p.solution = example3_solution(T, t0, x0, x1);
    p.default_start_state = {0.0};
  } else if (name == "unconstrained") {
    reject_unknown(params, {"f_const", "g_const"});
    const double f = param_or(params, "f_const", 0.0);
    const double g = param_or(params, "g_const", 0.0);
    if (f < 0.0 || g < 0.0)
      throw ConfigError("unconstrained: cost constants must be non-negative");
    p.spec.constraint = ConstraintSet::empty(1);
    p.spec.costs = CostSpec::constants(f, g);
    p.solution = unconstrained_solution(T, f, g);
    p.default_start_state = {0.0};
  } else {
    throw ConfigError("unknown problem name: " + name);
  }
  return p;
}

std::vector<std::string> builtin_problem_names() {
  return {"example1", "example2", "example3", "unconstrained"};
}

}  // namespace lqsc

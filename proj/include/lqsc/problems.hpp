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

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lqsc/estimator.hpp"
#include "lqsc/oracles.hpp"

namespace lqsc {

// One registered analytically solvable problem: its specification, closed
// form, and the canonical simulation start point.
struct BuiltinProblem {
  std::string name;
  ProblemSpec spec;
  std::optional<ClosedFormSolution> solution;
  double default_start_time = 0.0;
  std::vector<double> default_start_state;
};

// Registered names: "example1" (terminal half-line barrier), "example2"
// (running half-line barrier), "example3" (slab at one instant, parameters
// t0/x0/x1), "unconstrained" (no barrier, parameters f_const/g_const). All
// use driftless unit-dispersion scalar dynamics. Unknown names or parameters
// raise ConfigError.
BuiltinProblem make_builtin_problem(
    const std::string& name, double T = 1.0,
    const std::map<std::string, double>& params = {});

std::vector<std::string> builtin_problem_names();

}  // namespace lqsc

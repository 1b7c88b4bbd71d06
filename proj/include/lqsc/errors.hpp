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

#include <stdexcept>
#include <string>

namespace lqsc {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// State vector length does not match the declared dimension.
class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

// Scalar argument outside its admissible interval (e.g. u outside [0,1]).
class OutOfRange : public Error {
 public:
  using Error::Error;
};

// Ill-posed constraint parameters (e.g. empty slab interval).
class InvalidGeometry : public Error {
 public:
  using Error::Error;
};

// Requested evaluation point lies in the forbidden set.
class PointOutsideC : public Error {
 public:
  using Error::Error;
};

// A finite-difference probe point lies outside the survival set.
class ProbeOutsideC : public Error {
 public:
  using Error::Error;
};

// Every simulated path in a batch hit a non-finite state.
class AllPathsNonFinite : public Error {
 public:
  using Error::Error;
};

// A verification check needs a value oracle at interior points and none is
// registered for the problem.
class RequiresUOracle : public Error {
 public:
  using Error::Error;
};

// Effective sample size of a weighted ensemble is too small to test.
class DegenerateWeights : public Error {
 public:
  using Error::Error;
};

// Malformed experiment configuration; message carries field context.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace lqsc

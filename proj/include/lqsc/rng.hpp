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

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace lqsc {

// Philox4x32-10 keyed block cipher (Salmon et al., SC 2011). One call maps a
// 64-bit key and a 128-bit counter to four independent 32-bit words. Being
// counter-based, any word of any stream can be produced without sequential
// state, which is what makes batched simulation deterministic under an
// arbitrary number of worker threads.
std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_hi,
                                        std::uint64_t ctr_lo);

// A per-path source of Gaussian and uniform variates. The stream is a pure
// function of (master_seed, path_index, draw index): it holds no mutable
// state and is safe to copy and to use concurrently. Distinct path indices
// select disjoint counter blocks and therefore independent streams.
//
// Draw layout: normal(j) is the j-th N(0,1) variate of the path; consecutive
// pairs come from one Box-Muller transform of one Philox block. Bernoulli
// draws for barrier-bridge tests live in a reserved counter lane so they
// never collide with the increment sequence.
class NoiseStream {
 public:
  NoiseStream(std::uint64_t master_seed, std::uint64_t path_index)
      : master_seed_(master_seed), path_index_(path_index) {}

  std::uint64_t master_seed() const { return master_seed_; }
  std::uint64_t path_index() const { return path_index_; }

  // j-th standard normal variate of this stream.
  double normal(std::uint64_t j) const;

  // Both variates of the Box-Muller pair holding indices 2*draw and 2*draw+1.
  std::array<double, 2> normal_pair(std::uint64_t draw) const;

  // Uniform (0,1) variate from the reserved bridge lane, one per time step.
  double uniform_bridge(std::uint64_t step) const;

 private:
  double uniform53(std::uint64_t draw, bool second) const;

  std::uint64_t master_seed_;
  std::uint64_t path_index_;

  static constexpr std::uint64_t kBridgeLane = std::uint64_t{1} << 62;
};

// n_steps * dim_noise Gaussian increments with variance dt per coordinate,
// flattened row-major by step. Entry (k, c) equals
// normal(k*dim_noise + c) * sqrt(dt), so callers that scale per-step
// (e.g. a clamped final step) stay coupled with callers of this function.
std::vector<double> gaussian_increments(const NoiseStream& stream,
                                        std::size_t n_steps,
                                        std::size_t dim_noise, double dt);

}  // namespace lqsc

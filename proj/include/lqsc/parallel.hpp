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
#include <span>

namespace lqsc {

// Splits [0, n) into contiguous chunks and runs fn(begin, end) on each, using
// up to `workers` threads (0 selects the hardware concurrency). Items must be
// independent: results may only be written to per-index slots, which is what
// keeps batch output identical for every worker count.
void parallel_chunks(std::size_t n, unsigned workers,
                     const std::function<void(std::size_t, std::size_t)>& fn);

// Pairwise (tree) summation. Fixed association order, so the result does not
// depend on how the inputs were produced, and rounding error grows like
// O(log n) instead of O(n).
double pairwise_sum(std::span<const double> xs);

}  // namespace lqsc

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

#include "lqsc/rng.hpp"

#include <cmath>

namespace lqsc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo,
                    std::uint32_t& hi) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(p);
  hi = static_cast<std::uint32_t>(p >> 32);
}

inline void philox_round(std::uint32_t ctr[4], const std::uint32_t key[2]) {
  std::uint32_t lo0, hi0, lo1, hi1;
  mulhilo(kPhiloxM0, ctr[0], lo0, hi0);
  mulhilo(kPhiloxM1, ctr[2], lo1, hi1);
  const std::uint32_t out0 = hi1 ^ ctr[1] ^ key[0];
  const std::uint32_t out2 = hi0 ^ ctr[3] ^ key[1];
  ctr[0] = out0;
  ctr[1] = lo1;
  ctr[2] = out2;
  ctr[3] = lo0;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t ctr_hi,
                                        std::uint64_t ctr_lo) {
  std::uint32_t c[4] = {
      static_cast<std::uint32_t>(ctr_lo), static_cast<std::uint32_t>(ctr_lo >> 32),
      static_cast<std::uint32_t>(ctr_hi), static_cast<std::uint32_t>(ctr_hi >> 32)};
  std::uint32_t k[2] = {static_cast<std::uint32_t>(key),
                        static_cast<std::uint32_t>(key >> 32)};
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    k[0] += kPhiloxW0;
    k[1] += kPhiloxW1;
  }
  return {c[0], c[1], c[2], c[3]};
}

double NoiseStream::uniform53(std::uint64_t draw, bool second) const {
  const auto w = philox4x32(master_seed_, path_index_, draw);
  const std::uint64_t bits =
      second ? (static_cast<std::uint64_t>(w[3]) << 32) | w[2]
             : (static_cast<std::uint64_t>(w[1]) << 32) | w[0];
  // 53-bit mantissa, offset by half an ulp so the result never hits 0 or 1.
  return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
}

std::array<double, 2> NoiseStream::normal_pair(std::uint64_t draw) const {
  const double u1 = uniform53(draw, false);
  const double u2 = uniform53(draw, true);
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

double NoiseStream::normal(std::uint64_t j) const {
  return normal_pair(j >> 1)[j & 1];
}

double NoiseStream::uniform_bridge(std::uint64_t step) const {
  return uniform53(kBridgeLane | step, false);
}

std::vector<double> gaussian_increments(const NoiseStream& stream,
                                        std::size_t n_steps,
                                        std::size_t dim_noise, double dt) {
  const std::size_t n = n_steps * dim_noise;
  std::vector<double> out(n);
  const double scale = std::sqrt(dt);
  for (std::size_t i = 0; i < n; i += 2) {
    const auto z = stream.normal_pair(i >> 1);
    out[i] = z[0] * scale;
    if (i + 1 < n) out[i + 1] = z[1] * scale;
  }
  return out;
}

}  // namespace lqsc

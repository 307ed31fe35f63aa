// Copyright 2026 The LAREN Authors. All Rights Reserved.
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

#include <cstdint>

#include "laren/tensor.hpp"

namespace laren {

/// PCG32 (XSH-RR, 64-bit state, selectable stream).
///
/// Seeding: state = 0, inc = (stream << 1) | 1, advance, state += seed, advance.
/// Advance: state = state * 6364136223846793005 + inc.
/// Output of the pre-advance state s: rotr32(((s >> 18) ^ s) >> 27, s >> 59).
class Rng {
 public:
  static constexpr std::uint64_t kMultiplier = 6364136223846793005ULL;

  Rng(std::uint64_t seed, std::uint64_t stream) : state_(0), inc_((stream << 1U) | 1U) {
    next_u32();
    state_ += seed;
    next_u32();
  }

  std::uint32_t next_u32() {
    const std::uint64_t old = state_;
    state_ = old * kMultiplier + inc_;
    const auto xorshifted = static_cast<std::uint32_t>(((old >> 18U) ^ old) >> 27U);
    const auto rot = static_cast<std::uint32_t>(old >> 59U);
    return (xorshifted >> rot) | (xorshifted << ((-rot) & 31U));
  }

  /// next_u32() * 2^-32, in [0, 1).
  double uniform() { return static_cast<double>(next_u32()) * 0x1.0p-32; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Box-Muller over two consecutive uniforms u1, u2:
  /// sqrt(-2 ln(1 - u1)) * cos(2 pi u2). No second value is cached.
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(1.0 - u1)) * std::cos(2.0 * kPi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t state() const { return state_; }
  std::uint64_t increment() const { return inc_; }

 private:
  static constexpr double kPi = 3.14159265358979323846;

  std::uint64_t state_;
  std::uint64_t inc_;
};

Tensor rng_uniform(Rng& rng, Shape shape, double lo = 0.0, double hi = 1.0);
Tensor rng_normal(Rng& rng, Shape shape, double mean = 0.0, double stddev = 1.0);

/// Stream identifiers; every consumer of randomness draws from its own stream.
namespace streams {
inline constexpr std::uint64_t kInit = 1;
inline constexpr std::uint64_t kGenerator = 2;
inline constexpr std::uint64_t kPerceptual = 3;
inline constexpr std::uint64_t kGradcheck = 4;
inline constexpr std::uint64_t kBatch = 1ULL << 20;
inline constexpr std::uint64_t kNoise = 1ULL << 32;
inline constexpr std::uint64_t kSample = 1ULL << 40;
}  // namespace streams

}  // namespace laren

/*
 * Copyright 2026 The slowpool authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SLOWPOOL_RNG_HPP
#define SLOWPOOL_RNG_HPP

#include <array>
#include <cstdint>

#include "slowpool/sim_time.hpp"

namespace slowpool {

/// Deterministic random source: xoshiro256** (Blackman & Vigna) seeded via
/// splitmix64. Both algorithms are published with reference implementations,
/// so the stream for a given seed is reproducible on any platform. One Rng
/// instance is threaded through an entire scenario build; all per-connection
/// parameters are drawn eagerly at construction time, never during the run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform integer in [lo, hi], drawn as lo + next_u64() % span.
  /// Throws BadRangeError if lo > hi.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  /// Uniform double in (0, 1], from the top 53 bits of next_u64().
  double uniform_unit();

  /// Exponential inter-arrival gap for a Poisson process of `rate_per_sec`,
  /// floored to whole microseconds. Uses detmath::log_unit for cross-platform
  /// bit stability.
  SimTime exponential_gap(double rate_per_sec);

 private:
  std::array<std::uint64_t, 4> state_;
};

}  // namespace slowpool

#endif  // SLOWPOOL_RNG_HPP

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

#ifndef SLOWPOOL_SIM_TIME_HPP
#define SLOWPOOL_SIM_TIME_HPP

#include <compare>
#include <cstdint>

namespace slowpool {

/// Virtual time in integer microseconds. All simulated time quantities are
/// exact integers so runs are bit-reproducible; there is no floating-point
/// clock anywhere in the simulation.
struct SimTime {
  std::int64_t micros = 0;

  constexpr auto operator<=>(const SimTime&) const = default;

  constexpr SimTime operator+(SimTime rhs) const { return {micros + rhs.micros}; }
  constexpr SimTime operator-(SimTime rhs) const { return {micros - rhs.micros}; }
  constexpr SimTime& operator+=(SimTime rhs) {
    micros += rhs.micros;
    return *this;
  }

  constexpr double seconds() const { return static_cast<double>(micros) / 1e6; }
};

constexpr SimTime micros(std::int64_t us) { return {us}; }
constexpr SimTime millis(std::int64_t ms) { return {ms * 1000}; }
constexpr SimTime seconds(std::int64_t s) { return {s * 1'000'000}; }

}  // namespace slowpool

#endif  // SLOWPOOL_SIM_TIME_HPP

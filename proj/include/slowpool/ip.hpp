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

#ifndef SLOWPOOL_IP_HPP
#define SLOWPOOL_IP_HPP

#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace slowpool {

class Rng;

/// IPv4 address as a host-order 32-bit value. IPv6 is out of scope.
struct IpAddr {
  std::uint32_t value = 0;

  constexpr auto operator<=>(const IpAddr&) const = default;

  std::string to_string() const;
  static IpAddr parse(const std::string& text);  // throws MalformedError
};

/// CIDR block. Host bits below the prefix must be zero; parse rejects
/// non-canonical text instead of silently masking it.
struct Cidr {
  IpAddr base;
  int prefix_len = 0;

  constexpr auto operator<=>(const Cidr&) const = default;

  std::uint32_t mask() const;
  bool contains(IpAddr ip) const;

  /// Host capacity under the usual convention: network and broadcast
  /// addresses are excluded, so 2^(32-len) - 2 for len <= 30 and zero for
  /// longer prefixes.
  std::uint64_t usable_hosts() const;

  std::string to_string() const;
};

/// Parses `a.b.c.d/len`. Throws MalformedError on syntax, NonZeroHostBitsError
/// when the base has bits set below the prefix.
Cidr parse_cidr(const std::string& text);

/// Picks `n` distinct host addresses inside `block`, deterministically for a
/// given rng state (sparse Fisher-Yates over the host index space). Models an
/// attacker fanning out over a cloud block of virtual IPs.
/// Throws BlockExhaustedError when n exceeds the block's usable host count.
std::vector<IpAddr> allocate_virtual_ips(const Cidr& block, std::uint64_t n, Rng& rng);

}  // namespace slowpool

#endif  // SLOWPOOL_IP_HPP

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

#include "slowpool/ip.hpp"

#include <charconv>
#include <unordered_map>

#include "slowpool/errors.hpp"
#include "slowpool/rng.hpp"

namespace slowpool {

namespace {

bool parse_u32(std::string_view text, std::uint32_t max, std::uint32_t& out) {
  if (text.empty() || text.size() > 10) return false;
  std::uint32_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return false;
  if (v > max) return false;
  out = v;
  return true;
}

}  // namespace

std::string IpAddr::to_string() const {
  std::string out;
  out.reserve(15);
  for (int shift = 24; shift >= 0; shift -= 8) {
    out += std::to_string((value >> shift) & 0xFF);
    if (shift > 0) out += '.';
  }
  return out;
}

IpAddr IpAddr::parse(const std::string& text) {
  std::uint32_t value = 0;
  std::string_view rest = text;
  for (int octet = 0; octet < 4; ++octet) {
    const std::size_t dot = rest.find('.');
    const bool last = octet == 3;
    if (last != (dot == std::string_view::npos)) {
      throw MalformedError("ip", "expected dotted quad: " + text);
    }
    const std::string_view part = last ? rest : rest.substr(0, dot);
    std::uint32_t v = 0;
    if (!parse_u32(part, 255, v)) {
      throw MalformedError("ip", "bad octet in: " + text);
    }
    value = (value << 8) | v;
    if (!last) rest = rest.substr(dot + 1);
  }
  return IpAddr{value};
}

std::uint32_t Cidr::mask() const {
  if (prefix_len <= 0) return 0;
  return ~std::uint32_t{0} << (32 - prefix_len);
}

bool Cidr::contains(IpAddr ip) const {
  return (ip.value & mask()) == base.value;
}

std::uint64_t Cidr::usable_hosts() const {
  if (prefix_len > 30) return 0;
  return (std::uint64_t{1} << (32 - prefix_len)) - 2;
}

std::string Cidr::to_string() const {
  return base.to_string() + "/" + std::to_string(prefix_len);
}

Cidr parse_cidr(const std::string& text) {
  const std::size_t slash = text.find('/');
  if (slash == std::string::npos) {
    throw MalformedError("cidr", "missing '/': " + text);
  }
  const IpAddr base = IpAddr::parse(text.substr(0, slash));
  std::uint32_t len = 0;
  if (!parse_u32(std::string_view(text).substr(slash + 1), 32, len)) {
    throw MalformedError("cidr", "bad prefix length: " + text);
  }
  Cidr cidr{base, static_cast<int>(len)};
  if ((base.value & ~cidr.mask()) != 0) {
    throw NonZeroHostBitsError("cidr: host bits set below prefix: " + text);
  }
  return cidr;
}

std::vector<IpAddr> allocate_virtual_ips(const Cidr& block, std::uint64_t n, Rng& rng) {
  if (n == 0) return {};
  const std::uint64_t usable = block.usable_hosts();
  if (n > usable) {
    throw BlockExhaustedError("allocate_virtual_ips: " + std::to_string(n) +
                              " addresses requested from " + block.to_string() + " (" +
                              std::to_string(usable) + " usable)");
  }

  // Sparse Fisher-Yates over host indices [0, usable): index i maps to
  // base + 1 + i, which skips the network address and can never reach the
  // broadcast address.
  std::unordered_map<std::uint64_t, std::uint64_t> swapped;
  auto slot = [&swapped](std::uint64_t i) {
    const auto it = swapped.find(i);
    return it == swapped.end() ? i : it->second;
  };

  std::vector<IpAddr> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    const auto j = static_cast<std::uint64_t>(
        rng.uniform_int(static_cast<std::int64_t>(i), static_cast<std::int64_t>(usable - 1)));
    const std::uint64_t picked = slot(j);
    swapped[j] = slot(i);
    out.push_back(IpAddr{static_cast<std::uint32_t>(block.base.value + 1 + picked)});
  }
  return out;
}

}  // namespace slowpool

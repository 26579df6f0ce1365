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

#ifndef SLOWPOOL_PROVIDER_MAP_HPP
#define SLOWPOOL_PROVIDER_MAP_HPP

#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "slowpool/ip.hpp"

namespace slowpool {

/// Static CIDR -> cloud-provider attribution table, the concrete form of
/// provider identity in this testbed (mirrors how published provider IP
/// ranges are used in practice). Immutable after construction; lookups use
/// longest matching prefix, first entry wins among equal lengths.
class ProviderMap {
 public:
  ProviderMap() = default;

  void add(const Cidr& block, const std::string& provider);

  /// Longest-prefix match; nullopt when no entry covers `ip`.
  std::optional<std::string> provider_of(IpAddr ip) const;

  /// File format: one `<cidr> <provider-id>` per line, `#` starts a comment.
  /// Provider ids are restricted to [A-Za-z0-9._-] so they can be embedded in
  /// whitespace-separated log payloads.
  static ProviderMap load(std::istream& in);
  static ProviderMap load_file(const std::string& path);  // throws MissingFileError

  const std::vector<std::pair<Cidr, std::string>>& entries() const { return entries_; }

 private:
  std::vector<std::pair<Cidr, std::string>> entries_;
};

}  // namespace slowpool

#endif  // SLOWPOOL_PROVIDER_MAP_HPP

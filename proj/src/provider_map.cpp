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

#include "slowpool/provider_map.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "slowpool/errors.hpp"

namespace slowpool {

namespace {

bool valid_provider_id(const std::string& id) {
  if (id.empty()) return false;
  for (const char c : id) {
    if (!std::isalnum(static_cast<unsigned char>(c)) && c != '.' && c != '_' && c != '-') {
      return false;
    }
  }
  return true;
}

}  // namespace

void ProviderMap::add(const Cidr& block, const std::string& provider) {
  if (!valid_provider_id(provider)) {
    throw MalformedError("provider", "invalid provider id: '" + provider + "'");
  }
  entries_.emplace_back(block, provider);
}

std::optional<std::string> ProviderMap::provider_of(IpAddr ip) const {
  const std::pair<Cidr, std::string>* best = nullptr;
  for (const auto& entry : entries_) {
    if (!entry.first.contains(ip)) continue;
    if (best == nullptr || entry.first.prefix_len > best->first.prefix_len) {
      best = &entry;
    }
  }
  if (best == nullptr) return std::nullopt;
  return best->second;
}

ProviderMap ProviderMap::load(std::istream& in) {
  ProviderMap map;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);

    std::istringstream fields(line);
    std::string cidr_text, provider, extra;
    if (!(fields >> cidr_text)) continue;  // blank line
    if (!(fields >> provider) || (fields >> extra)) {
      throw MalformedError("provider_table",
                           "line " + std::to_string(line_no) + ": expected '<cidr> <provider-id>'");
    }
    try {
      map.add(parse_cidr(cidr_text), provider);
    } catch (const Error& e) {
      throw MalformedError("provider_table", "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return map;
}

ProviderMap ProviderMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MissingFileError("provider table not readable: " + path);
  return load(in);
}

}  // namespace slowpool

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

#ifndef SLOWPOOL_SHA256_HPP
#define SLOWPOOL_SHA256_HPP

#include <string>
#include <string_view>

namespace slowpool {

/// FIPS 180-4 SHA-256, lowercase hex digest. Used for event-log determinism
/// fingerprints.
std::string sha256_hex(std::string_view data);

}  // namespace slowpool

#endif  // SLOWPOOL_SHA256_HPP

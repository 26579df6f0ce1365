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

#ifndef SLOWPOOL_DET_MATH_HPP
#define SLOWPOOL_DET_MATH_HPP

namespace slowpool::detmath {

/// Natural logarithm of x in (0, 1], computed with only IEEE-754 basic
/// operations (frexp split + atanh series) so the result is bit-identical on
/// every conforming platform. libm's log() is allowed to differ between libc
/// implementations, which would break event-log fingerprint reproducibility
/// for Poisson workloads. The library is compiled with -ffp-contract=off.
double log_unit(double x);

}  // namespace slowpool::detmath

#endif  // SLOWPOOL_DET_MATH_HPP

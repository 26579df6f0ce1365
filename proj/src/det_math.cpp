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

#include "slowpool/det_math.hpp"

#include <cassert>
#include <cmath>

namespace slowpool::detmath {

double log_unit(double x) {
  assert(x > 0.0 && x <= 1.0);
  if (x == 1.0) return 0.0;

  // x = m * 2^e with m in [0.5, 1). std::frexp is exact (pure bit surgery).
  int e = 0;
  const double m = std::frexp(x, &e);

  // ln(m) = 2 * atanh(z) with z = (m-1)/(m+1), |z| <= 1/3.
  const double z = (m - 1.0) / (m + 1.0);
  const double z2 = z * z;

  // 21-term odd series, Horner form. Terms decay by >= 9x per step, so the
  // truncation error is far below one ulp of the result.
  double acc = 1.0 / 41.0;
  for (int k = 19; k >= 0; --k) {
    acc = acc * z2 + 1.0 / static_cast<double>(2 * k + 1);
  }
  const double ln_m = 2.0 * z * acc;

  constexpr double kLn2 = 0.69314718055994530942;
  return ln_m + static_cast<double>(e) * kLn2;
}

}  // namespace slowpool::detmath

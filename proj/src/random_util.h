// Copyright 2026 The propspan Authors.
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

#ifndef PROPSPAN_SRC_RANDOM_UTIL_H_
#define PROPSPAN_SRC_RANDOM_UTIL_H_

#include <cstdint>
#include <random>

namespace propspan {

// Distributions in <random> are implementation-defined; these conversions
// depend only on the (standardized) engine output, so seeded runs agree
// across standard libraries.

inline double UnitUniform(std::mt19937_64 &rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double SymmetricUniform(std::mt19937_64 &rng, double scale) {
  return (2.0 * UnitUniform(rng) - 1.0) * scale;
}

// Uniform integer in [0, bound) by rejection.
inline uint64_t UniformIndex(std::mt19937_64 &rng, uint64_t bound) {
  const uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  uint64_t draw;
  do {
    draw = rng();
  } while (draw >= limit);
  return draw % bound;
}

}  // namespace propspan

#endif  // PROPSPAN_SRC_RANDOM_UTIL_H_

// Copyright 2026 The olt authors
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

#include "olt/rng.hpp"

#include <cmath>

namespace olt {
namespace {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

// splitmix64 finalizer.
std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

RngStream RngStream::substream(std::uint64_t master, std::uint64_t label_a,
                               std::uint64_t label_b, std::uint64_t label_c) {
  std::uint64_t key = mix(master + kGamma);
  key = mix(key ^ mix(label_a + 0xd1342543de82ef95ULL));
  key = mix(key ^ mix(label_b + 0xaf251af3b0f025b5ULL));
  key = mix(key ^ mix(label_c + 0xb564ef22ec7aece5ULL));
  return RngStream(key);
}

std::uint64_t RngStream::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * kGamma);
}

double RngStream::next_unit() {
  // 53 high bits give a uniform double in [0, 1).
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::uniform(double lo, double hi) {
  return lo + (hi - lo) * next_unit();
}

double RngStream::next_normal() {
  // u1 in (0, 1] keeps the logarithm finite.
  const double u1 = 1.0 - next_unit();
  const double u2 = next_unit();
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
}

Vec RngStream::normal_vector(int d) {
  Vec g(static_cast<std::size_t>(d));
  for (int k = 0; k < d; ++k) g[static_cast<std::size_t>(k)] = next_normal();
  return g;
}

}  // namespace olt

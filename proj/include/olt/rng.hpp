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

#pragma once

#include <cstdint>

#include "olt/vec.hpp"

namespace olt {

// Counter-based pseudo random stream: output i is splitmix64(key + i * GAMMA)
// where the key is itself derived by mixing a master seed with up to three
// stream labels. Streams derived from distinct labels are independent for
// practical purposes, results are reproducible bit for bit across platforms,
// and no global state is involved. Normal deviates use the Box-Muller
// transform (cosine branch only, one deviate per pair of uniforms) so that
// the draw count per sample is fixed.
class RngStream {
 public:
  explicit RngStream(std::uint64_t key) : key_(key), counter_(0) {}

  // Derives the key for a labelled substream of a master seed. Typical use:
  // substream(seed, t, j) for the exploration draw of point j at round t.
  static RngStream substream(std::uint64_t master, std::uint64_t label_a,
                             std::uint64_t label_b = 0, std::uint64_t label_c = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1).
  double next_unit();

  // Uniform on [lo, hi).
  double uniform(double lo, double hi);

  // Standard normal deviate.
  double next_normal();

  // Vector of d independent standard normal deviates.
  Vec normal_vector(int d);

 private:
  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace olt

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

#include "olt/oracles.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace olt::oracles {

double w2_squared_permutation(const std::vector<Point>& a, const std::vector<Point>& b) {
  if (a.empty() || a.size() != b.size())
    throw std::invalid_argument("permutation oracle needs equal nonempty point sets");
  if (a.size() > 8) throw std::invalid_argument("permutation oracle budget is 8 points");
  const std::size_t m = a.size();
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  double best = std::numeric_limits<double>::infinity();
  do {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += dist_sq(a[j], b[perm[j]]);
    best = std::min(best, s);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best / static_cast<double>(m);
}

ConstraintSet random_constraints(RngStream& rng) {
  ConstraintSet c;
  c.dim = 1 + static_cast<int>(rng.next_u64() % 3);
  const std::size_t n = 1 + static_cast<std::size_t>(rng.next_u64() % 6);
  for (std::size_t i = 0; i < n; ++i) {
    Vec a(static_cast<std::size_t>(c.dim));
    for (double& v : a) v = rng.uniform(-1.0, 1.0);
    c.directions.push_back(std::move(a));
    c.offsets.push_back(rng.uniform(-1.0, 1.0));
  }
  return c;
}

std::pair<DiscreteMeasure, DiscreteMeasure> random_measure_pair(RngStream& rng) {
  const int d = 1 + static_cast<int>(rng.next_u64() % 3);
  const std::size_t m = 1 + static_cast<std::size_t>(rng.next_u64() % 6);
  auto draw = [&](std::size_t count) {
    std::vector<Point> pts(count);
    for (Point& p : pts) {
      p.resize(static_cast<std::size_t>(d));
      for (double& v : p) v = rng.uniform(-1.0, 1.0);
    }
    return DiscreteMeasure::uniform(std::move(pts));
  };
  return {draw(m), draw(m)};
}

}  // namespace olt::oracles

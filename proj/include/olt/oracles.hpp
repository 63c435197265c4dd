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

#include <utility>

#include "olt/measures.hpp"
#include "olt/rng.hpp"
#include "olt/selection.hpp"

namespace olt::oracles {

// Squared transport distance between two uniform measures with equally many
// atoms by brute force over permutations (Birkhoff: some permutation matrix
// is optimal). Sizes must match and stay at most 8.
double w2_squared_permutation(const std::vector<Point>& a, const std::vector<Point>& b);

// Random constraint system with dim in 1..3, 1..6 rows, entries uniform in
// [-1, 1]. Used to cross-check the solver against oracle_min_norm.
ConstraintSet random_constraints(RngStream& rng);

// Random pair of uniform measures with equal atom counts (1..6 each),
// dimension 1..3, coordinates uniform in [-1, 1].
std::pair<DiscreteMeasure, DiscreteMeasure> random_measure_pair(RngStream& rng);

}  // namespace olt::oracles

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

namespace olt {

// All fixed numeric tolerances live here. Feasibility-type tolerances are
// multiplied by a per-instance scale (see constraint_scale) so that
// classification is stable under rescaling of the data.

// Measure weights must sum to one within this.
inline constexpr double kWeightSumTol = 1e-12;

// Coupling marginals must match the measure weights within this.
inline constexpr double kMarginalTol = 1e-9;

// Two grid points closer than this (coordinatewise) count as duplicates.
inline constexpr double kGridDupTol = 1e-12;

// A constraint counts as satisfied when its violation is at most
// kFeasTol * constraint_scale.
inline constexpr double kFeasTol = 1e-8;

// Complementary-slackness residual allowed in KKT certificates,
// times constraint_scale.
inline constexpr double kComplementTol = 1e-6;

// Relative threshold under which a constraint direction is treated as
// linearly dependent on the active set.
inline constexpr double kDependenceTol = 1e-13;

// Version string echoed into run records.
inline constexpr const char* kVersion = "0.1.0";

}  // namespace olt

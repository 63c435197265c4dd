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

#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "olt/domain.hpp"
#include "olt/measures.hpp"
#include "olt/selection.hpp"
#include "olt/vec.hpp"

namespace olt {

// Scenarios are round-indexed loss generators. Rounds are 1-based
// throughout; round t means "the t-th revealed loss".

// V_t(x) = |x - u_t|^2 with target u_t = start + (t - 1) * drift.
struct MovingQuadratic {
  Point start;
  Point drift;

  Point target(int t) const;
};

// V_t(x) = min(|x - u_t|^2, |x - v_t|^2), each target drifting linearly.
// Non-convex: the pointwise minimum of two convex bowls.
struct MinOfQuadratics {
  Point u_start, u_drift;
  Point v_start, v_drift;

  Point u_target(int t) const;
  Point v_target(int t) const;
};

// One-dimensional double well with minima at -1 and +1:
// V_t(x) = a_t (x + 1)^2 for x < 0, a_t (x - 1)^2 for x >= 0.
// Amplitudes satisfy a_t >= floor > 0; an empty schedule means a_t is
// constant.
struct WShapePotential {
  double amplitude = 1.0;
  std::vector<double> amplitudes;  // per-round override of `amplitude`
  double floor = 1.0;              // lower bound every a_t must respect

  double amplitude_at(int t) const;
};

// W(u) = |u|^2.
struct QuadraticKernel {};

// W identically zero; useful as a degenerate test scenario.
struct ZeroKernel {};

// Convex kernel registered under a name via register_interaction_kernel.
struct NamedKernel {
  std::string name;
};

using InteractionKernel = std::variant<QuadraticKernel, ZeroKernel, NamedKernel>;

void register_interaction_kernel(const std::string& name,
                                 std::function<double(const Vec&)> fn);
double kernel_value(const InteractionKernel& kernel, const Vec& u);

// Pairwise-kernel loss; the same kernel is revealed every round.
struct InteractionScenario {
  InteractionKernel kernel;
};

using Scenario =
    std::variant<MovingQuadratic, MinOfQuadratics, WShapePotential, InteractionScenario>;

bool is_interaction(const Scenario& sc);

// Checks structural invariants against the ambient dimension; returns a
// description of the first violation or std::nullopt.
std::optional<std::string> validate(const Scenario& sc, int dim);

// Everything the player learns at round t: potential values on decision
// points and grid, or pairwise kernel tables. Nothing else about the loss
// is observable.
struct OracleView {
  int round = 1;
  bool interaction = false;
  std::vector<double> values_at_points;  // size m (potential scenarios)
  std::vector<double> values_at_grid;    // size n (potential scenarios)
  PairwiseKernelValues kernels;          // interaction scenarios
};

OracleView reveal(const Scenario& sc, int t, const std::vector<Point>& decision_points,
                  const GridSet& grid);

// Pointwise evaluation for analysis and tests. Throws when called from
// inside an algorithm round (see OracleGuard): algorithms may only consume
// the revealed view.
double eval_potential(const Scenario& sc, int t, const Point& x);

// RAII guard marking "algorithm code is running" on this thread. While any
// guard is alive, eval_potential refuses to run.
class OracleGuard {
 public:
  OracleGuard();
  ~OracleGuard();
  OracleGuard(const OracleGuard&) = delete;
  OracleGuard& operator=(const OracleGuard&) = delete;
  static bool active();
};

// Exact supremum of |loss integrand| over a bounded region across rounds
// 1..horizon: sup over t and x of |V_t(x)|, or of W over difference vectors
// for interaction kernels. Throws for unbounded regions (except the zero
// kernel) and for MinOfQuadratics above dimension two.
double sup_abs_bound(const Scenario& sc, int horizon, const DomainSpec& region);

}  // namespace olt

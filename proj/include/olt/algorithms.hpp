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
#include <stdexcept>
#include <utility>
#include <variant>
#include <vector>

#include "olt/domain.hpp"
#include "olt/environments.hpp"
#include "olt/measures.hpp"
#include "olt/selection.hpp"
#include "olt/vec.hpp"

namespace olt {

// The player's side of the game: m equally weighted decision points and the
// 1-based index of the upcoming round.
struct PlayerState {
  std::vector<Point> points;
  int round = 1;

  int dimension() const;
  DiscreteMeasure measure() const;  // uniform over the decision points
};

enum class Variant { MinimalSelection, MSoE, Relaxed, Interaction };

struct AlgorithmConfig {
  double eta = 0.1;
  Variant variant = Variant::MinimalSelection;
  DomainSpec domain;
};

// Per-point record of what the update did.
struct MinSelAction {
  Vec xi;
};
struct ExploreAction {
  Vec gaussian;
  double scale;
};
struct RelaxAction {
  Vec xi;
  double slack;
};
using PointAction = std::variant<MinSelAction, ExploreAction, RelaxAction>;

struct StepReport {
  int round = 1;
  std::vector<std::size_t> feasible_set;  // sorted indices into [m]
  std::vector<PointAction> actions;       // one per decision point
  std::vector<Point> pre_projection;      // updated points before projection

  std::size_t infeasible_count() const { return actions.size() - feasible_set.size(); }
  // Sum over points of |xi|^2 (exploration actions contribute zero).
  double sum_xi_sq() const;
  // Sum over points of the slack variable (zero outside the relaxed variant).
  double slack_sum() const;
  // Sum over exploring points of max_i [V(x) - V(z_i)]_+, recovered from the
  // stored scale: scale^2 * d / eta.
  double explore_penalty_sum(double eta, int dim) const;
  double explore_scale_max() const;
};

// Raised when a variant without an exploration or slack fallback meets an
// infeasible point.
struct InfeasiblePointError : std::runtime_error {
  std::size_t point_index;
  int round;
  InfeasiblePointError(std::size_t j, int t);
};

// sqrt(eta * max_i [value_at_point - values_at_grid[i]]_+ / dim).
double exploration_scale(double value_at_point, const std::vector<double>& values_at_grid,
                         double eta, int dim);

// One round of each algorithm variant. All take the revealed view for the
// state's current round and return the advanced state plus a report.
// Updates are x' = project(x - eta * xi) for solved points; MSoE replaces
// the step with a scaled Gaussian for infeasible points, drawn from the
// substream (seed, round, point index).
std::pair<PlayerState, StepReport> minimal_selection_round(const PlayerState& state,
                                                           const OracleView& view,
                                                           const GridSet& grid,
                                                           const AlgorithmConfig& cfg);

std::pair<PlayerState, StepReport> msoe_round(const PlayerState& state, const OracleView& view,
                                              const GridSet& grid, const AlgorithmConfig& cfg,
                                              std::uint64_t seed);

std::pair<PlayerState, StepReport> relaxed_round(const PlayerState& state,
                                                 const OracleView& view, const GridSet& grid,
                                                 const AlgorithmConfig& cfg);

std::pair<PlayerState, StepReport> interaction_round(const PlayerState& state,
                                                     const OracleView& view,
                                                     const GridSet& grid,
                                                     const AlgorithmConfig& cfg);

}  // namespace olt

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

#include "olt/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "olt/rng.hpp"
#include "olt/tolerances.hpp"

namespace olt {

int PlayerState::dimension() const {
  if (points.empty()) throw std::logic_error("dimension of empty state");
  return static_cast<int>(points.front().size());
}

DiscreteMeasure PlayerState::measure() const { return DiscreteMeasure::uniform(points); }

double StepReport::sum_xi_sq() const {
  double s = 0.0;
  for (const PointAction& a : actions) {
    if (const auto* ms = std::get_if<MinSelAction>(&a)) s += norm_sq(ms->xi);
    if (const auto* rx = std::get_if<RelaxAction>(&a)) s += norm_sq(rx->xi);
  }
  return s;
}

double StepReport::slack_sum() const {
  double s = 0.0;
  for (const PointAction& a : actions)
    if (const auto* rx = std::get_if<RelaxAction>(&a)) s += rx->slack;
  return s;
}

double StepReport::explore_penalty_sum(double eta, int dim) const {
  double s = 0.0;
  for (const PointAction& a : actions)
    if (const auto* ex = std::get_if<ExploreAction>(&a))
      s += ex->scale * ex->scale * static_cast<double>(dim) / eta;
  return s;
}

double StepReport::explore_scale_max() const {
  double s = 0.0;
  for (const PointAction& a : actions)
    if (const auto* ex = std::get_if<ExploreAction>(&a)) s = std::max(s, ex->scale);
  return s;
}

InfeasiblePointError::InfeasiblePointError(std::size_t j, int t)
    : std::runtime_error("no feasible direction for decision point " + std::to_string(j) +
                         " at round " + std::to_string(t)),
      point_index(j),
      round(t) {}

double exploration_scale(double value_at_point, const std::vector<double>& values_at_grid,
                         double eta, int dim) {
  if (values_at_grid.empty()) throw std::invalid_argument("no grid values");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  if (dim <= 0) throw std::invalid_argument("dim must be positive");
  double gap = 0.0;
  for (double v : values_at_grid) gap = std::max(gap, value_at_point - v);
  return std::sqrt(eta * gap / static_cast<double>(dim));
}

namespace {

void check_round_inputs(const PlayerState& state, const OracleView& view, const GridSet& grid,
                        const AlgorithmConfig& cfg, bool want_interaction) {
  if (state.points.empty()) throw std::invalid_argument("state has no decision points");
  if (view.round != state.round)
    throw std::invalid_argument("view round does not match state round");
  if (!(cfg.eta > 0.0) || !std::isfinite(cfg.eta))
    throw std::invalid_argument("eta must be positive");
  if (auto err = validate(grid)) throw std::invalid_argument("grid: " + *err);
  if (state.dimension() != grid.dimension())
    throw std::invalid_argument("state/grid dimension mismatch");
  if (view.interaction != want_interaction)
    throw std::invalid_argument("view type does not match algorithm variant");
  if (!want_interaction) {
    if (view.values_at_points.size() != state.points.size())
      throw std::invalid_argument("view has wrong number of point values");
    if (view.values_at_grid.size() != grid.size())
      throw std::invalid_argument("view has wrong number of grid values");
  }
}

PlayerState advance(const PlayerState& state, std::vector<Point> new_points) {
  PlayerState next;
  next.points = std::move(new_points);
  next.round = state.round + 1;
  return next;
}

}  // namespace

std::pair<PlayerState, StepReport> minimal_selection_round(const PlayerState& state,
                                                           const OracleView& view,
                                                           const GridSet& grid,
                                                           const AlgorithmConfig& cfg) {
  check_round_inputs(state, view, grid, cfg, false);
  OracleGuard guard;
  StepReport report;
  report.round = state.round;
  std::vector<Point> next(state.points.size());
  for (std::size_t j = 0; j < state.points.size(); ++j) {
    const ConstraintSet c = build_potential_constraints(
        state.points[j], grid, view.values_at_points[j], view.values_at_grid);
    const SelectionOutcome sol = min_norm_select(c);
    if (!sol.feasible())
      throw InfeasiblePointError(j, state.round);
    report.feasible_set.push_back(j);
    report.actions.push_back(MinSelAction{sol.xi});
    Point p = state.points[j];
    axpy(-cfg.eta, sol.xi, p);
    report.pre_projection.push_back(p);
    next[j] = project(p, cfg.domain);
  }
  return {advance(state, std::move(next)), std::move(report)};
}

std::pair<PlayerState, StepReport> msoe_round(const PlayerState& state, const OracleView& view,
                                              const GridSet& grid, const AlgorithmConfig& cfg,
                                              std::uint64_t seed) {
  check_round_inputs(state, view, grid, cfg, false);
  OracleGuard guard;
  StepReport report;
  report.round = state.round;
  const int d = state.dimension();
  std::vector<Point> next(state.points.size());
  for (std::size_t j = 0; j < state.points.size(); ++j) {
    const ConstraintSet c = build_potential_constraints(
        state.points[j], grid, view.values_at_points[j], view.values_at_grid);
    const SelectionOutcome sol = min_norm_select(c);
    Point p = state.points[j];
    if (sol.feasible()) {
      report.feasible_set.push_back(j);
      report.actions.push_back(MinSelAction{sol.xi});
      axpy(-cfg.eta, sol.xi, p);
    } else {
      const double scale =
          exploration_scale(view.values_at_points[j], view.values_at_grid, cfg.eta, d);
      RngStream rng = RngStream::substream(seed, static_cast<std::uint64_t>(state.round),
                                           static_cast<std::uint64_t>(j));
      const Vec g = rng.normal_vector(d);
      report.actions.push_back(ExploreAction{g, scale});
      axpy(-scale, g, p);
    }
    report.pre_projection.push_back(p);
    next[j] = project(p, cfg.domain);
  }
  return {advance(state, std::move(next)), std::move(report)};
}

std::pair<PlayerState, StepReport> relaxed_round(const PlayerState& state,
                                                 const OracleView& view, const GridSet& grid,
                                                 const AlgorithmConfig& cfg) {
  check_round_inputs(state, view, grid, cfg, false);
  OracleGuard guard;
  StepReport report;
  report.round = state.round;
  std::vector<Point> next(state.points.size());
  for (std::size_t j = 0; j < state.points.size(); ++j) {
    const ConstraintSet c = build_potential_constraints(
        state.points[j], grid, view.values_at_points[j], view.values_at_grid);
    const RelaxedOutcome sol = relaxed_select(c, cfg.eta);
    // Vanishing slack marks the point as effectively feasible.
    if (sol.slack <= 1e-10 * constraint_scale(c)) report.feasible_set.push_back(j);
    report.actions.push_back(RelaxAction{sol.xi, sol.slack});
    Point p = state.points[j];
    axpy(-cfg.eta, sol.xi, p);
    report.pre_projection.push_back(p);
    next[j] = project(p, cfg.domain);
  }
  return {advance(state, std::move(next)), std::move(report)};
}

std::pair<PlayerState, StepReport> interaction_round(const PlayerState& state,
                                                     const OracleView& view,
                                                     const GridSet& grid,
                                                     const AlgorithmConfig& cfg) {
  check_round_inputs(state, view, grid, cfg, true);
  OracleGuard guard;
  StepReport report;
  report.round = state.round;
  std::vector<Point> next(state.points.size());
  for (std::size_t j = 0; j < state.points.size(); ++j) {
    const ConstraintSet c = build_interaction_constraints(j, state.points, grid, view.kernels);
    const SelectionOutcome sol = min_norm_select(c);
    if (!sol.feasible())
      throw InfeasiblePointError(j, state.round);
    report.feasible_set.push_back(j);
    report.actions.push_back(MinSelAction{sol.xi});
    Point p = state.points[j];
    axpy(-cfg.eta, sol.xi, p);
    report.pre_projection.push_back(p);
    next[j] = project(p, cfg.domain);
  }
  return {advance(state, std::move(next)), std::move(report)};
}

}  // namespace olt

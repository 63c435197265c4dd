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

#include <cstddef>
#include <vector>

#include <nlohmann/json.hpp>

#include "olt/measures.hpp"
#include "olt/vec.hpp"

namespace olt {

// Linear inequality system <a_i, xi> >= b_i, i = 1..n, over xi in R^dim.
struct ConstraintSet {
  int dim = 0;
  std::vector<Vec> directions;  // a_i
  std::vector<double> offsets;  // b_i

  std::size_t size() const { return directions.size(); }
  nlohmann::json to_json() const;
};

// 1 + max_i(|a_i|^2 + |b_i|). Feasibility and complementarity tolerances are
// multiplied by this so classification is stable under rescaling.
double constraint_scale(const ConstraintSet& c);

// Subgradient-style constraints induced by revealed potential values:
// a_i = x - z_i, b_i = v_at_x - v_at_grid[i].
ConstraintSet build_potential_constraints(const Point& x, const GridSet& grid,
                                          double v_at_x,
                                          const std::vector<double>& v_at_grid);

// Tables of pairwise kernel values over decision points and grid points.
struct PairwiseKernelValues {
  std::vector<std::vector<double>> xx;  // m x m, W(x_j - x_k)
  std::vector<std::vector<double>> zz;  // n x n, W(z_i - z_k)
  std::vector<std::vector<double>> xz;  // m x n, W(x_j - z_i)
};

// Constraints for decision point j of an interaction game:
// a_i = x_j - z_i, b_i = mean_k W(x_j - x_k) - min_k W(z_i - z_k).
ConstraintSet build_interaction_constraints(std::size_t j,
                                            const std::vector<Point>& decision_points,
                                            const GridSet& grid,
                                            const PairwiseKernelValues& kernels);

struct SelectionOutcome {
  enum class Status { Feasible, Infeasible };
  Status status = Status::Infeasible;

  // Least-norm feasible point, valid when Feasible.
  Vec xi;

  // Dual certificate when Feasible: nonnegative, one entry per constraint,
  // xi = sum_i multipliers[i] * a_i and complementary slackness holds.
  std::vector<double> multipliers;

  // Infeasibility certificate when Infeasible: nonnegative y with
  // sum_i y_i a_i = 0 and sum_i y_i b_i > 0.
  std::vector<double> farkas;

  bool feasible() const { return status == Status::Feasible; }
};

// Minimum-norm point of {xi : <a_i, xi> >= b_i for all i}, or an
// infeasibility certificate if the system is empty. Dual active-set method;
// exact up to the fixed tolerances.
SelectionOutcome min_norm_select(const ConstraintSet& c);

struct RelaxedOutcome {
  Vec xi;
  double slack = 0.0;  // common nonnegative violation allowance s
  std::vector<double> multipliers;
};

// Minimizer of |xi|^2 + (2/eta) s over s >= 0, <a_i, xi> >= b_i - s.
// Always solvable; slack is zero exactly when the unrelaxed system is
// feasible and its least-norm multipliers sum to at most 1/eta.
RelaxedOutcome relaxed_select(const ConstraintSet& c, double eta);

// Independent reference solver: enumerates candidate active subsets of size
// at most dim and checks optimality conditions directly. Exponential in n;
// callers must keep n <= 12 and dim <= 4.
SelectionOutcome oracle_min_norm(const ConstraintSet& c);

}  // namespace olt

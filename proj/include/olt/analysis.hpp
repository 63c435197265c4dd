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
#include <string>
#include <vector>

#include "olt/algorithms.hpp"
#include "olt/environments.hpp"
#include "olt/measures.hpp"
#include "olt/vec.hpp"

namespace olt {

enum class ReferenceKind { BestGridDirac, UniformGrid, UserSupplied };

// Fixed comparator measure supported on the grid.
struct ReferenceMeasure {
  ReferenceKind kind = ReferenceKind::UniformGrid;
  std::vector<std::size_t> support;  // grid indices with positive weight
  std::vector<double> weights;       // matching support, sums to one

  DiscreteMeasure measure(const GridSet& grid) const;
};

// Dirac at the grid point with the smallest cumulative value; ties resolve
// to the lowest index. grid_values_per_round is T rows of n values.
ReferenceMeasure best_grid_reference(
    const std::vector<std::vector<double>>& grid_values_per_round);

ReferenceMeasure uniform_grid_reference(std::size_t n);

// Validates the weights (size n, nonnegative, sum one).
ReferenceMeasure user_reference(std::vector<double> weights);

// Player loss for the revealed round: mean potential value over decision
// points, or the pairwise kernel mean for interaction rounds.
double player_loss(const OracleView& view);

// Loss of the reference measure for the same round.
double reference_loss(const ReferenceMeasure& ref, const OracleView& view);

// Per-run series needed to evaluate regret bounds against one reference.
struct RegretLedger {
  Variant variant = Variant::MinimalSelection;
  ReferenceKind ref_kind = ReferenceKind::BestGridDirac;
  double eta = 0.0;
  int rounds = 0;  // T
  int m = 0;

  std::vector<double> loss;      // size T
  std::vector<double> ref_loss;  // size T

  // w2sq[t] = squared transport distance from the state entering round t+1
  // to the reference: indices 0..T when full. When full_w2 is false only
  // the endpoints {index 0, index T} are stored, in that order.
  bool full_w2 = true;
  std::vector<double> w2sq;

  std::vector<double> sum_xi_sq_over_m;  // size T
  std::vector<double> slack_sum;         // size T, sum over points of s_j
  std::vector<double> explore_sum;       // size T, sum over exploring points of the gap
  std::vector<double> explore_scale_max; // size T
  std::vector<int> infeasible_count;     // size T

  double regret_cum(int t) const;  // prefix sum of loss - ref_loss
  double w2sq_start() const;
  double w2sq_after(int t) const;  // after round t (t = rounds when partial)
};

// Bound right-hand sides for a prefix of 1 <= T <= ledger.rounds rounds.
// Each checks the ledger's variant and throws on a mismatch.

// Telescoped bound for exact potential descent:
// (w2sq_start - w2sq_after(T)) / (2 eta) + (eta/2) sum_t sum_xi_sq_over_m.
double bound_rhs_convex(const RegretLedger& led, int T);

// Exploration bound (no telescoped negative term):
// w2sq_start/(2 eta) + (eta/2) sum_t sum_xi_sq_over_m
// + (3/2) sum_t explore_sum[t]/m.
double bound_rhs_msoe(const RegretLedger& led, int T);

// Exploration bound plus the shrinking-infeasibility surcharge
// 3 B gamma^{-1} (initial infeasible fraction).
double bound_rhs_shrinking(const RegretLedger& led, int T, double gamma, double B);

// Slack-relaxed bound: telescoped terms plus
// (eta/2) sum_t (sum_xi_sq_over_m + (2/eta) slack_sum/m).
double bound_rhs_relaxed(const RegretLedger& led, int T);

// Interaction-kernel bound; same shape as the telescoped potential bound.
double bound_rhs_interaction(const RegretLedger& led, int T);

// Lower bound on the per-round escape probability of an exploring point in
// the double-well scenario: Phi(-1 / sqrt(epsilon * eta)).
double gamma_lower_bound(double epsilon, double eta);

// Fraction of infeasible points per round.
std::vector<double> infeasible_fraction_series(const std::vector<StepReport>& reports,
                                               std::size_t m);

struct InequalityReport {
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  double slack = 0.0;  // rhs + tol - lhs
  bool pass = false;
};

InequalityReport check_inequality(double lhs, double rhs, double tol);

}  // namespace olt

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

#include "olt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "olt/tolerances.hpp"

namespace olt {

DiscreteMeasure ReferenceMeasure::measure(const GridSet& grid) const {
  if (support.size() != weights.size() || support.empty())
    throw std::logic_error("reference measure: bad support");
  DiscreteMeasure mu;
  for (std::size_t k = 0; k < support.size(); ++k) {
    if (support[k] >= grid.size())
      throw std::invalid_argument("reference support index outside grid");
    mu.points.push_back(grid.points[support[k]]);
    mu.weights.push_back(weights[k]);
  }
  if (auto err = validate(mu)) throw std::logic_error("reference measure: " + *err);
  return mu;
}

ReferenceMeasure best_grid_reference(
    const std::vector<std::vector<double>>& grid_values_per_round) {
  if (grid_values_per_round.empty())
    throw std::invalid_argument("best_grid_reference: no rounds");
  const std::size_t n = grid_values_per_round.front().size();
  if (n == 0) throw std::invalid_argument("best_grid_reference: empty grid");
  std::vector<double> cum(n, 0.0);
  for (const auto& row : grid_values_per_round) {
    if (row.size() != n)
      throw std::invalid_argument("best_grid_reference: ragged value rows");
    for (std::size_t i = 0; i < n; ++i) cum[i] += row[i];
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < n; ++i)
    if (cum[i] < cum[best]) best = i;  // strict: ties keep the lowest index
  ReferenceMeasure ref;
  ref.kind = ReferenceKind::BestGridDirac;
  ref.support = {best};
  ref.weights = {1.0};
  return ref;
}

ReferenceMeasure uniform_grid_reference(std::size_t n) {
  if (n == 0) throw std::invalid_argument("uniform_grid_reference: empty grid");
  ReferenceMeasure ref;
  ref.kind = ReferenceKind::UniformGrid;
  ref.support.resize(n);
  for (std::size_t i = 0; i < n; ++i) ref.support[i] = i;
  ref.weights.assign(n, 1.0 / static_cast<double>(n));
  return ref;
}

ReferenceMeasure user_reference(std::vector<double> weights) {
  if (weights.empty()) throw std::invalid_argument("user_reference: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w) || w < 0.0)
      throw std::invalid_argument("user_reference: weights must be nonnegative");
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol)
    throw std::invalid_argument("user_reference: weights must sum to one");
  ReferenceMeasure ref;
  ref.kind = ReferenceKind::UserSupplied;
  for (std::size_t i = 0; i < weights.size(); ++i)
    if (weights[i] > 0.0) {
      ref.support.push_back(i);
      ref.weights.push_back(weights[i]);
    }
  if (ref.support.empty()) throw std::invalid_argument("user_reference: zero measure");
  return ref;
}

double player_loss(const OracleView& view) {
  if (view.interaction) {
    const std::size_t m = view.kernels.xx.size();
    if (m == 0) throw std::invalid_argument("player_loss: empty kernel table");
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k) s += view.kernels.xx[j][k];
    return s / (static_cast<double>(m) * static_cast<double>(m));
  }
  if (view.values_at_points.empty()) throw std::invalid_argument("player_loss: empty view");
  double s = 0.0;
  for (double v : view.values_at_points) s += v;
  return s / static_cast<double>(view.values_at_points.size());
}

double reference_loss(const ReferenceMeasure& ref, const OracleView& view) {
  if (view.interaction) {
    const std::size_t n = view.kernels.zz.size();
    double s = 0.0;
    for (std::size_t a = 0; a < ref.support.size(); ++a)
      for (std::size_t b = 0; b < ref.support.size(); ++b) {
        if (ref.support[a] >= n || ref.support[b] >= n)
          throw std::invalid_argument("reference support outside kernel table");
        s += ref.weights[a] * ref.weights[b] * view.kernels.zz[ref.support[a]][ref.support[b]];
      }
    return s;
  }
  double s = 0.0;
  for (std::size_t a = 0; a < ref.support.size(); ++a) {
    if (ref.support[a] >= view.values_at_grid.size())
      throw std::invalid_argument("reference support outside grid values");
    s += ref.weights[a] * view.values_at_grid[ref.support[a]];
  }
  return s;
}

double RegretLedger::regret_cum(int t) const {
  if (t < 0 || t > rounds) throw std::invalid_argument("regret_cum: round out of range");
  double s = 0.0;
  for (int k = 0; k < t; ++k) s += loss[static_cast<std::size_t>(k)] - ref_loss[static_cast<std::size_t>(k)];
  return s;
}

double RegretLedger::w2sq_start() const {
  if (w2sq.empty()) throw std::logic_error("ledger has no transport series");
  return w2sq.front();
}

double RegretLedger::w2sq_after(int t) const {
  if (t < 0 || t > rounds) throw std::invalid_argument("w2sq_after: round out of range");
  if (full_w2) return w2sq.at(static_cast<std::size_t>(t));
  if (t == 0) return w2sq.front();
  if (t == rounds) return w2sq.back();
  throw std::logic_error("ledger stores only endpoint transport distances");
}

namespace {

void check_prefix(const RegretLedger& led, int T) {
  if (T < 0 || T > led.rounds)
    throw std::invalid_argument("bound prefix outside recorded rounds");
  if (led.loss.size() != static_cast<std::size_t>(led.rounds))
    throw std::logic_error("ledger series length mismatch");
}

void require_variant(const RegretLedger& led, std::initializer_list<Variant> allowed,
                     const char* what) {
  for (Variant v : allowed)
    if (led.variant == v) return;
  throw std::invalid_argument(std::string(what) + ": run used an incompatible variant");
}

}  // namespace

double bound_rhs_convex(const RegretLedger& led, int T) {
  check_prefix(led, T);
  require_variant(led, {Variant::MinimalSelection}, "telescoped potential bound");
  if (T == 0) return 0.0;
  double kinetic = 0.0;
  for (int t = 0; t < T; ++t) kinetic += led.sum_xi_sq_over_m[static_cast<std::size_t>(t)];
  return (led.w2sq_start() - led.w2sq_after(T)) / (2.0 * led.eta) + 0.5 * led.eta * kinetic;
}

double bound_rhs_msoe(const RegretLedger& led, int T) {
  check_prefix(led, T);
  require_variant(led, {Variant::MSoE}, "exploration bound");
  double kinetic = 0.0, explore = 0.0;
  for (int t = 0; t < T; ++t) {
    kinetic += led.sum_xi_sq_over_m[static_cast<std::size_t>(t)];
    explore += led.explore_sum[static_cast<std::size_t>(t)] / static_cast<double>(led.m);
  }
  return led.w2sq_start() / (2.0 * led.eta) + 0.5 * led.eta * kinetic + 1.5 * explore;
}

double bound_rhs_shrinking(const RegretLedger& led, int T, double gamma, double B) {
  if (!(gamma > 0.0) || gamma >= 1.0)
    throw std::invalid_argument("shrinking bound: gamma must lie in (0, 1)");
  if (!(B >= 0.0)) throw std::invalid_argument("shrinking bound: negative sup bound");
  const double base = bound_rhs_msoe(led, T);
  if (T == 0) return base;
  const double frac0 =
      static_cast<double>(led.infeasible_count.front()) / static_cast<double>(led.m);
  return base + 3.0 * B * frac0 / gamma;
}

double bound_rhs_relaxed(const RegretLedger& led, int T) {
  check_prefix(led, T);
  require_variant(led, {Variant::Relaxed}, "slack-relaxed bound");
  if (T == 0) return 0.0;
  double sum = 0.0;
  for (int t = 0; t < T; ++t) {
    const std::size_t k = static_cast<std::size_t>(t);
    sum += led.sum_xi_sq_over_m[k] +
           (2.0 / led.eta) * led.slack_sum[k] / static_cast<double>(led.m);
  }
  return (led.w2sq_start() - led.w2sq_after(T)) / (2.0 * led.eta) + 0.5 * led.eta * sum;
}

double bound_rhs_interaction(const RegretLedger& led, int T) {
  check_prefix(led, T);
  require_variant(led, {Variant::Interaction}, "interaction bound");
  if (T == 0) return 0.0;
  double kinetic = 0.0;
  for (int t = 0; t < T; ++t) kinetic += led.sum_xi_sq_over_m[static_cast<std::size_t>(t)];
  return (led.w2sq_start() - led.w2sq_after(T)) / (2.0 * led.eta) + 0.5 * led.eta * kinetic;
}

double gamma_lower_bound(double epsilon, double eta) {
  if (!(epsilon > 0.0) || !(eta > 0.0))
    throw std::invalid_argument("gamma_lower_bound: parameters must be positive");
  // Phi(-x) = erfc(x / sqrt(2)) / 2.
  const double x = 1.0 / std::sqrt(epsilon * eta);
  return 0.5 * std::erfc(x / std::sqrt(2.0));
}

std::vector<double> infeasible_fraction_series(const std::vector<StepReport>& reports,
                                               std::size_t m) {
  if (m == 0) throw std::invalid_argument("infeasible_fraction_series: m must be positive");
  std::vector<double> out;
  out.reserve(reports.size());
  for (const StepReport& r : reports) {
    if (r.actions.size() != m)
      throw std::invalid_argument("infeasible_fraction_series: report size mismatch");
    out.push_back(static_cast<double>(r.infeasible_count()) / static_cast<double>(m));
  }
  return out;
}

InequalityReport check_inequality(double lhs, double rhs, double tol) {
  InequalityReport rep;
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.tol = tol;
  rep.slack = rhs + tol - lhs;
  rep.pass = lhs <= rhs + tol;
  return rep;
}

}  // namespace olt

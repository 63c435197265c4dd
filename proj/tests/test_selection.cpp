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

#include <algorithm>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "olt/oracles.hpp"
#include "olt/rng.hpp"
#include "olt/selection.hpp"
#include "olt/tolerances.hpp"

using namespace olt;

namespace {

GridSet grid1d(std::initializer_list<double> zs) {
  GridSet g;
  for (double z : zs) g.points.push_back(Point{z});
  return g;
}

// The double-well instance with wells at -1 and 1: V(x) = (|x| - 1)^2.
ConstraintSet double_well_constraints(double x) {
  const double vx = (std::abs(x) - 1.0) * (std::abs(x) - 1.0);
  return build_potential_constraints(Point{x}, grid1d({-1.0, 1.0}), vx, {0.0, 0.0});
}

bool satisfies_all(const ConstraintSet& c, const Vec& xi, double tol) {
  for (std::size_t i = 0; i < c.size(); ++i)
    if (dot(c.directions[i], xi) < c.offsets[i] - tol) return false;
  return true;
}

// Independent reference for the slack-relaxed program. The partial minimum
// f(s) = min{|xi|^2 : <a_i, xi> >= b_i - s} is convex in s, so a golden-
// section search over s with the enumeration solver at each probe finds the
// optimum of f(s) + (2/eta) s without touching the production code path.
double relaxed_objective_by_search(const ConstraintSet& c, double eta) {
  double hi = 0.0;
  for (double b : c.offsets) hi = std::max(hi, b);
  hi += 1.0;
  auto value = [&](double s) {
    ConstraintSet shifted = c;
    for (double& b : shifted.offsets) b -= s;
    const SelectionOutcome out = oracle_min_norm(shifted);
    if (!out.feasible()) return std::numeric_limits<double>::infinity();
    return norm_sq(out.xi) + (2.0 / eta) * s;
  };
  double lo = 0.0;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = value(x1), f2 = value(x2);
  for (int it = 0; it < 200; ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = value(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = value(x2);
    }
  }
  return std::min({value(a), value(b), value(0.0)});
}

}  // namespace

TEST_CASE("potential constraints take differences against the grid") {
  const ConstraintSet c = double_well_constraints(1.25);
  REQUIRE(c.size() == 2);
  CHECK(c.directions[0][0] == doctest::Approx(2.25));
  CHECK(c.directions[1][0] == doctest::Approx(0.25));
  CHECK(c.offsets[0] == doctest::Approx(0.0625));
  CHECK(c.offsets[1] == doctest::Approx(0.0625));
}

TEST_CASE("a point sitting on a grid point produces a zero row") {
  const ConstraintSet c =
      build_potential_constraints(Point{-1.0}, grid1d({-1.0, 1.0}), 0.0, {0.0, 0.0});
  CHECK(c.directions[0][0] == 0.0);
  CHECK(c.offsets[0] == 0.0);
}

TEST_CASE("constraints carry the value gap as offset") {
  GridSet g;
  g.points = {{1.0, 0.0}};
  const ConstraintSet c = build_potential_constraints(Point{0.0, 0.0}, g, 2.0, {1.0});
  CHECK(c.directions[0][0] == doctest::Approx(-1.0));
  CHECK(c.directions[0][1] == doctest::Approx(0.0));
  CHECK(c.offsets[0] == doctest::Approx(1.0));
}

TEST_CASE("interaction offsets vanish for a single point with zero kernel") {
  PairwiseKernelValues kv;
  kv.xx = {{0.0}};
  kv.zz = {{0.0}};
  kv.xz = {{0.0}};
  const ConstraintSet c = build_interaction_constraints(0, {{0.0}}, grid1d({0.0}), kv);
  REQUIRE(c.size() == 1);
  CHECK(c.offsets[0] == 0.0);
}

TEST_CASE("interaction offsets average the pairwise energies") {
  // Points {0, 2}, W(u) = u^2, grid {0}: offset (1/2)(0 + 4) - W(0) = 2.
  PairwiseKernelValues kv;
  kv.xx = {{0.0, 4.0}, {4.0, 0.0}};
  kv.zz = {{0.0}};
  kv.xz = {{0.0}, {4.0}};
  const ConstraintSet c = build_interaction_constraints(0, {{0.0}, {2.0}}, grid1d({0.0}), kv);
  REQUIRE(c.size() == 1);
  CHECK(c.offsets[0] == doctest::Approx(2.0));
  CHECK(c.directions[0][0] == 0.0);
  CHECK(!min_norm_select(c).feasible());
}

TEST_CASE("interaction self-pairs participate in the grid minimum") {
  // Grid {0, 2}: min_k W(z_1 - z_k) = min(W(0), W(-2)) = 0.
  PairwiseKernelValues kv;
  kv.xx = {{0.0}};
  kv.zz = {{0.0, 4.0}, {4.0, 0.0}};
  kv.xz = {{1.0, 1.0}};
  const ConstraintSet c = build_interaction_constraints(0, {{1.0}}, grid1d({0.0, 2.0}), kv);
  REQUIRE(c.size() == 2);
  CHECK(c.offsets[0] == doctest::Approx(0.0));
  CHECK(c.offsets[1] == doctest::Approx(0.0));
}

TEST_CASE("nonpositive offsets admit the origin") {
  ConstraintSet c;
  c.dim = 2;
  c.directions = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, -1.0}};
  c.offsets = {0.0, -0.5, -1.0};
  const SelectionOutcome out = min_norm_select(c);
  REQUIRE(out.feasible());
  CHECK(norm(out.xi) == 0.0);
}

TEST_CASE("the double-well slope at x = 1.25 is 0.25") {
  const SelectionOutcome out = min_norm_select(double_well_constraints(1.25));
  REQUIRE(out.feasible());
  CHECK(out.xi[0] == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("the double-well barrier point is infeasible with a certificate") {
  const ConstraintSet c = double_well_constraints(0.0);
  const SelectionOutcome out = min_norm_select(c);
  REQUIRE(!out.feasible());
  REQUIRE(out.farkas.size() == c.size());
  Vec combo(1, 0.0);
  double payoff = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    CHECK(out.farkas[i] >= 0.0);
    axpy(out.farkas[i], c.directions[i], combo);
    payoff += out.farkas[i] * c.offsets[i];
  }
  CHECK(norm(combo) <= 1e-8);
  CHECK(payoff > 0.0);
}

TEST_CASE("feasible outcomes carry a valid dual certificate") {
  RngStream rng(71);
  for (int k = 0; k < 300; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const SelectionOutcome out = min_norm_select(c);
    if (!out.feasible()) continue;
    const double scale = constraint_scale(c);
    CHECK(satisfies_all(c, out.xi, kFeasTol * scale));
    REQUIRE(out.multipliers.size() == c.size());
    Vec combo(c.dim, 0.0);
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(out.multipliers[i] >= 0.0);
      axpy(out.multipliers[i], c.directions[i], combo);
      const double gap = dot(c.directions[i], out.xi) - c.offsets[i];
      CHECK(std::abs(out.multipliers[i] * gap) <= kComplementTol * scale);
    }
    CHECK(std::sqrt(dist_sq(combo, out.xi)) <= 1e-7 * scale);
  }
}

TEST_CASE("repeated solves are stable") {
  RngStream rng(72);
  for (int k = 0; k < 100; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const SelectionOutcome a = min_norm_select(c);
    const SelectionOutcome b = min_norm_select(c);
    REQUIRE(a.feasible() == b.feasible());
    if (a.feasible()) CHECK(std::sqrt(dist_sq(a.xi, b.xi)) <= 1e-10);
  }
}

TEST_CASE("the solution projects the origin onto the polyhedron") {
  RngStream rng(73);
  int checked = 0;
  for (int k = 0; k < 300 && checked < 120; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const SelectionOutcome out = min_norm_select(c);
    if (!out.feasible()) continue;
    const double scale = constraint_scale(c);
    // Random feasible competitors: perturb the solution and keep admissible
    // samples. The projection inequality <xi, xi - w> <= 0 must hold.
    for (int s = 0; s < 20; ++s) {
      Vec w = out.xi;
      for (double& x : w) x += rng.uniform(-1.0, 1.0);
      if (!satisfies_all(c, w, 0.0)) continue;
      CHECK(dot(out.xi, sub(out.xi, w)) <= kFeasTol * scale);
      ++checked;
    }
  }
  CHECK(checked > 50);
}

TEST_CASE("solver matches the enumeration oracle") {
  RngStream rng(74);
  for (int k = 0; k < 300; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const SelectionOutcome got = min_norm_select(c);
    const SelectionOutcome want = oracle_min_norm(c);
    REQUIRE(got.feasible() == want.feasible());
    if (got.feasible()) CHECK(std::sqrt(dist_sq(got.xi, want.xi)) <= 1e-6);
  }
}

TEST_CASE("gradients of convex quadratics are feasible and dominate the solution") {
  RngStream rng(75);
  for (int k = 0; k < 100; ++k) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 3);
    Point center(d), x(d);
    for (int i = 0; i < d; ++i) {
      center[i] = rng.uniform(-1.0, 1.0);
      x[i] = rng.uniform(-1.0, 1.0);
    }
    GridSet grid;
    const int n = 1 + static_cast<int>(rng.next_u64() % 6);
    for (int i = 0; i < n; ++i) {
      Point z(d);
      for (int e = 0; e < d; ++e) z[e] = rng.uniform(-1.0, 1.0);
      grid.points.push_back(z);
    }
    std::vector<double> vz;
    for (const Point& z : grid.points) vz.push_back(dist_sq(z, center));
    const ConstraintSet c = build_potential_constraints(x, grid, dist_sq(x, center), vz);
    const Vec grad = scaled(sub(x, center), 2.0);
    CHECK(satisfies_all(c, grad, 1e-12));
    const SelectionOutcome out = min_norm_select(c);
    REQUIRE(out.feasible());
    CHECK(norm(out.xi) <= norm(grad) + 1e-9);
  }
}

TEST_CASE("oracle rejects oversized instances") {
  ConstraintSet c;
  c.dim = 5;
  c.directions = {{1.0, 0.0, 0.0, 0.0, 0.0}};
  c.offsets = {0.0};
  CHECK_THROWS(oracle_min_norm(c));
}

TEST_CASE("relaxation is inert on feasible systems") {
  RngStream rng(76);
  int feasible_seen = 0;
  for (int k = 0; k < 200; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const SelectionOutcome base = min_norm_select(c);
    if (!base.feasible()) continue;
    double mult_sum = 0.0;
    for (double l : base.multipliers) mult_sum += l;
    // Large eta keeps slack expensive, so the cap on multipliers is slack.
    const double eta = std::min(0.5 / std::max(mult_sum, 1e-9), 1e6);
    const RelaxedOutcome rel = relaxed_select(c, eta);
    CHECK(rel.slack <= 1e-8 * constraint_scale(c));
    CHECK(std::sqrt(dist_sq(rel.xi, base.xi)) <= 1e-6 * constraint_scale(c));
    ++feasible_seen;
  }
  CHECK(feasible_seen > 50);
}

TEST_CASE("relaxation with a zero direction buys pure slack") {
  ConstraintSet c;
  c.dim = 1;
  c.directions = {{0.0}};
  c.offsets = {1.0};
  const RelaxedOutcome out = relaxed_select(c, 1.0);
  CHECK(norm(out.xi) <= 1e-10);
  CHECK(out.slack == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("relaxation returns the origin for nonpositive offsets") {
  ConstraintSet c;
  c.dim = 2;
  c.directions = {{1.0, 1.0}};
  c.offsets = {-1.0};
  const RelaxedOutcome out = relaxed_select(c, 0.3);
  CHECK(norm(out.xi) == 0.0);
  CHECK(out.slack == 0.0);
}

TEST_CASE("relaxed outcomes respect the shifted constraints") {
  RngStream rng(77);
  for (int k = 0; k < 200; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const double eta = rng.uniform(0.02, 2.0);
    const RelaxedOutcome out = relaxed_select(c, eta);
    const double scale = constraint_scale(c);
    CHECK(out.slack >= 0.0);
    for (std::size_t i = 0; i < c.size(); ++i)
      CHECK(dot(c.directions[i], out.xi) >= c.offsets[i] - out.slack - kFeasTol * scale);
    // The trivial candidate (xi = 0, s = max_i [b_i]_+) caps the objective.
    double cap = 0.0;
    for (double b : c.offsets) cap = std::max(cap, b);
    CHECK(norm_sq(out.xi) + (2.0 / eta) * out.slack <= (2.0 / eta) * cap + 1e-8 * scale);
  }
}

TEST_CASE("relaxed objective matches an independent search") {
  RngStream rng(78);
  for (int k = 0; k < 120; ++k) {
    const ConstraintSet c = oracles::random_constraints(rng);
    const double eta = rng.uniform(0.05, 1.5);
    const RelaxedOutcome out = relaxed_select(c, eta);
    const double got = norm_sq(out.xi) + (2.0 / eta) * out.slack;
    const double want = relaxed_objective_by_search(c, eta);
    CHECK(got <= want + 1e-6 * constraint_scale(c));
    CHECK(got >= want - 1e-6 * constraint_scale(c));
  }
}

TEST_CASE("constraint sets serialize for debugging") {
  const ConstraintSet c = double_well_constraints(1.25);
  const nlohmann::json j = c.to_json();
  CHECK(j.at("directions").size() == 2);
  CHECK(j.at("offsets").size() == 2);
}

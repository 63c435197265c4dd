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

#include "olt/measures.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "olt/tolerances.hpp"

namespace olt {

int DiscreteMeasure::dimension() const {
  if (points.empty()) throw std::logic_error("dimension of empty measure");
  return static_cast<int>(points.front().size());
}

DiscreteMeasure DiscreteMeasure::uniform(std::vector<Point> pts) {
  if (pts.empty()) throw std::invalid_argument("uniform measure needs at least one point");
  DiscreteMeasure mu;
  const double w = 1.0 / static_cast<double>(pts.size());
  mu.weights.assign(pts.size(), w);
  mu.points = std::move(pts);
  return mu;
}

DiscreteMeasure DiscreteMeasure::dirac(Point p) {
  DiscreteMeasure mu;
  mu.points.push_back(std::move(p));
  mu.weights.push_back(1.0);
  return mu;
}

int GridSet::dimension() const {
  if (points.empty()) throw std::logic_error("dimension of empty grid");
  return static_cast<int>(points.front().size());
}

std::optional<std::string> validate(const DiscreteMeasure& mu) {
  if (mu.points.empty()) return "measure has no atoms";
  if (mu.points.size() != mu.weights.size()) return "atom/weight count mismatch";
  const std::size_t d = mu.points.front().size();
  if (d == 0) return "atoms must have positive dimension";
  double sum = 0.0;
  for (std::size_t j = 0; j < mu.points.size(); ++j) {
    if (mu.points[j].size() != d) return "atoms have mixed dimensions";
    if (!all_finite(mu.points[j])) return "atom has non-finite coordinate";
    const double w = mu.weights[j];
    if (!std::isfinite(w)) return "weight is non-finite";
    if (w < 0.0) return "weight is negative";
    sum += w;
  }
  if (std::abs(sum - 1.0) > kWeightSumTol) return "weights do not sum to one";
  return std::nullopt;
}

std::optional<std::string> validate(const GridSet& grid) {
  if (grid.points.empty()) return "grid has no points";
  const std::size_t d = grid.points.front().size();
  if (d == 0) return "grid points must have positive dimension";
  for (const Point& p : grid.points) {
    if (p.size() != d) return "grid points have mixed dimensions";
    if (!all_finite(p)) return "grid point has non-finite coordinate";
  }
  for (std::size_t i = 0; i < grid.points.size(); ++i)
    for (std::size_t k = i + 1; k < grid.points.size(); ++k) {
      bool dup = true;
      for (std::size_t c = 0; c < d; ++c)
        if (std::abs(grid.points[i][c] - grid.points[k][c]) > kGridDupTol) {
          dup = false;
          break;
        }
      if (dup) return "grid contains duplicate points";
    }
  return std::nullopt;
}

double Coupling::cost() const {
  double s = 0.0;
  for (std::size_t j = 0; j < rows(); ++j)
    for (std::size_t i = 0; i < cols(); ++i) {
      const double m = plan[j * cols() + i];
      if (m > 0.0) s += m * dist_sq(row_points[j], col_points[i]);
    }
  return s;
}

nlohmann::json Coupling::to_json() const {
  nlohmann::json entries = nlohmann::json::array();
  for (std::size_t j = 0; j < rows(); ++j)
    for (std::size_t i = 0; i < cols(); ++i) {
      const double m = plan[j * cols() + i];
      if (m > 0.0) entries.push_back({j, i, m});
    }
  return nlohmann::json{{"rows", rows()}, {"cols", cols()}, {"entries", entries}};
}

namespace {

constexpr double kTinyMass = 1e-15;

struct Stripped {
  std::vector<Point> points;
  std::vector<double> weights;
};

Stripped strip_zero_atoms(const DiscreteMeasure& mu) {
  Stripped s;
  for (std::size_t j = 0; j < mu.points.size(); ++j)
    if (mu.weights[j] > 0.0) {
      s.points.push_back(mu.points[j]);
      s.weights.push_back(mu.weights[j]);
    }
  return s;
}

void check_pair(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (auto err = validate(mu)) throw std::invalid_argument("first measure: " + *err);
  if (auto err = validate(nu)) throw std::invalid_argument("second measure: " + *err);
  if (mu.dimension() != nu.dimension())
    throw std::invalid_argument("measures have different dimensions");
}

// Successive shortest augmenting paths with node potentials on the complete
// bipartite transport graph. Exact optimality by complementary slackness;
// every augmentation drives a supply, a deficit, or a backward arc to zero
// exactly, so the loop terminates.
void solve_transport(const std::vector<Point>& xs, std::vector<double> supply,
                     const std::vector<Point>& ys, std::vector<double> deficit,
                     std::vector<double>& plan) {
  const std::size_t R = xs.size();
  const std::size_t C = ys.size();
  plan.assign(R * C, 0.0);

  std::vector<double> cost(R * C);
  for (std::size_t j = 0; j < R; ++j)
    for (std::size_t i = 0; i < C; ++i) cost[j * C + i] = dist_sq(xs[j], ys[i]);

  const std::size_t V = R + C;
  std::vector<double> pot(V, 0.0);
  std::vector<double> dist(V);
  std::vector<std::int64_t> parent(V);
  std::vector<char> done(V);
  const double inf = std::numeric_limits<double>::infinity();

  std::size_t guard = 16 * (V + 4) * (V + 4);
  while (true) {
    // Any remaining supply? Stop once either side is exhausted; residuals
    // below kTinyMass are floating dust from Sum(a) != Sum(b) exactly.
    bool has_supply = false;
    for (std::size_t j = 0; j < R; ++j)
      if (supply[j] > kTinyMass) {
        has_supply = true;
        break;
      }
    bool has_deficit = false;
    for (std::size_t i = 0; i < C; ++i)
      if (deficit[i] > kTinyMass) {
        has_deficit = true;
        break;
      }
    if (!has_supply || !has_deficit) break;
    if (guard-- == 0) throw std::runtime_error("transport solver failed to converge");

    // Multi-source Dijkstra over reduced costs.
    for (std::size_t v = 0; v < V; ++v) {
      dist[v] = inf;
      parent[v] = -1;
      done[v] = 0;
    }
    for (std::size_t j = 0; j < R; ++j)
      if (supply[j] > kTinyMass) dist[j] = 0.0;

    for (std::size_t it = 0; it < V; ++it) {
      std::size_t u = V;
      double best = inf;
      for (std::size_t v = 0; v < V; ++v)
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      if (u == V) break;
      done[u] = 1;
      if (u < R) {
        const std::size_t j = u;
        for (std::size_t i = 0; i < C; ++i) {
          const std::size_t v = R + i;
          if (done[v]) continue;
          double rc = cost[j * C + i] + pot[u] - pot[v];
          if (rc < 0.0) rc = 0.0;  // floating dust
          if (dist[u] + rc < dist[v]) {
            dist[v] = dist[u] + rc;
            parent[v] = static_cast<std::int64_t>(u);
          }
        }
      } else {
        const std::size_t i = u - R;
        for (std::size_t j = 0; j < R; ++j) {
          if (done[j] || plan[j * C + i] <= 0.0) continue;
          double rc = -cost[j * C + i] + pot[u] - pot[j];
          if (rc < 0.0) rc = 0.0;
          if (dist[u] + rc < dist[j]) {
            dist[j] = dist[u] + rc;
            parent[j] = static_cast<std::int64_t>(u);
          }
        }
      }
    }

    std::size_t target = V;
    double best = inf;
    for (std::size_t i = 0; i < C; ++i)
      if (deficit[i] > kTinyMass && dist[R + i] < best) {
        best = dist[R + i];
        target = R + i;
      }
    if (target == V) throw std::runtime_error("transport solver: no augmenting path");

    const double dt = dist[target];
    for (std::size_t v = 0; v < V; ++v) pot[v] += std::min(dist[v], dt);

    // Bottleneck along the path.
    double amt = deficit[target - R];
    for (std::size_t v = target; parent[v] >= 0;) {
      const std::size_t p = static_cast<std::size_t>(parent[v]);
      if (v >= R)
        ;  // row -> col forward arc, uncapacitated
      else
        amt = std::min(amt, plan[v * C + (p - R)]);  // col -> row backward arc
      v = p;
      if (parent[v] < 0) amt = std::min(amt, supply[v]);
    }

    for (std::size_t v = target; parent[v] >= 0;) {
      const std::size_t p = static_cast<std::size_t>(parent[v]);
      if (v >= R)
        plan[p * C + (v - R)] += amt;
      else
        plan[v * C + (p - R)] -= amt;
      v = p;
      if (parent[v] < 0) supply[v] -= amt;
    }
    deficit[target - R] -= amt;
  }
}

// Cancels support cycles so the plan has forest support (at most R + C - 1
// strictly positive entries). All support arcs carry zero reduced cost, so
// alternating a cycle leaves the transport cost unchanged up to floating
// dust.
void forestify(std::size_t R, std::size_t C, std::vector<double>& plan) {
  const std::size_t V = R + C;
  std::size_t guard = R * C + 4;
  while (guard-- > 0) {
    std::vector<std::vector<std::size_t>> adj(V);
    for (std::size_t j = 0; j < R; ++j)
      for (std::size_t i = 0; i < C; ++i)
        if (plan[j * C + i] > 0.0) {
          adj[j].push_back(R + i);
          adj[R + i].push_back(j);
        }
    // DFS for a cycle. The support is a simple bipartite graph, so an edge
    // between visited nodes that is not a tree edge closes a cycle.
    std::vector<std::int64_t> par(V, -2);
    std::vector<std::size_t> cyc;
    for (std::size_t s = 0; s < V && cyc.empty(); ++s) {
      if (par[s] != -2) continue;
      std::vector<std::size_t> stack{s};
      par[s] = -1;
      while (!stack.empty() && cyc.empty()) {
        const std::size_t u = stack.back();
        stack.pop_back();
        for (std::size_t v : adj[u]) {
          if (static_cast<std::int64_t>(v) == par[u] ||
              par[v] == static_cast<std::int64_t>(u))
            continue;  // tree edge in either orientation
          if (par[v] == -2) {
            par[v] = static_cast<std::int64_t>(u);
            stack.push_back(v);
          } else {
            // Cycle: tree paths from u and v to their lowest common ancestor
            // plus the edge (u, v).
            std::vector<std::size_t> pu{u}, pv{v};
            for (std::int64_t w = par[u]; w >= 0; w = par[static_cast<std::size_t>(w)])
              pu.push_back(static_cast<std::size_t>(w));
            for (std::int64_t w = par[v]; w >= 0; w = par[static_cast<std::size_t>(w)])
              pv.push_back(static_cast<std::size_t>(w));
            while (pu.size() > 1 && pv.size() > 1 && pu[pu.size() - 2] == pv[pv.size() - 2]) {
              pu.pop_back();
              pv.pop_back();
            }
            cyc = pu;
            for (std::size_t k = pv.size() - 1; k-- > 0;) cyc.push_back(pv[k]);
            break;
          }
        }
      }
    }
    if (cyc.empty()) return;
    // Alternate masses around the cycle: edges at even positions gain, odd
    // positions lose, so at least one losing edge drops to zero exactly.
    const std::size_t L = cyc.size();
    auto edge_index = [&](std::size_t a, std::size_t b) {
      const std::size_t j = a < R ? a : b;
      const std::size_t i = a < R ? b - R : a - R;
      return j * C + i;
    };
    double delta = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < L; ++k)
      if (k % 2 == 1) delta = std::min(delta, plan[edge_index(cyc[k], cyc[(k + 1) % L])]);
    if (!(delta > 0.0) || !std::isfinite(delta)) return;
    for (std::size_t k = 0; k < L; ++k) {
      const std::size_t e = edge_index(cyc[k], cyc[(k + 1) % L]);
      if (k % 2 == 1)
        plan[e] -= delta;
      else
        plan[e] += delta;
    }
  }
}

}  // namespace

Coupling optimal_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  check_pair(mu, nu);
  Stripped a = strip_zero_atoms(mu);
  Stripped b = strip_zero_atoms(nu);
  const std::size_t R = a.points.size();
  const std::size_t C = b.points.size();

  Coupling cp;
  cp.row_points = a.points;
  cp.row_weights = a.weights;
  cp.col_points = b.points;
  cp.col_weights = b.weights;

  if (R == 1) {
    cp.plan = b.weights;
  } else if (C == 1) {
    cp.plan = a.weights;
  } else {
    solve_transport(a.points, a.weights, b.points, b.weights, cp.plan);
    forestify(R, C, cp.plan);
  }

  // Marginal invariant check.
  for (std::size_t j = 0; j < R; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < C; ++i) s += cp.plan[j * C + i];
    if (std::abs(s - a.weights[j]) > kMarginalTol)
      throw std::runtime_error("coupling row marginal out of tolerance");
  }
  for (std::size_t i = 0; i < C; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < R; ++j) s += cp.plan[j * C + i];
    if (std::abs(s - b.weights[i]) > kMarginalTol)
      throw std::runtime_error("coupling column marginal out of tolerance");
  }
  return cp;
}

double w2_squared(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (mu.points == nu.points && mu.weights == nu.weights) {
    check_pair(mu, nu);
    return 0.0;
  }
  return optimal_coupling(mu, nu).cost();
}

}  // namespace olt

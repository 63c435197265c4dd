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

#include "olt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "olt/tolerances.hpp"

namespace olt {

nlohmann::json ConstraintSet::to_json() const {
  return nlohmann::json{{"dim", dim}, {"directions", directions}, {"offsets", offsets}};
}

double constraint_scale(const ConstraintSet& c) {
  double mx = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    mx = std::max(mx, norm_sq(c.directions[i]) + std::abs(c.offsets[i]));
  return 1.0 + mx;
}

namespace {

void check_constraints(const ConstraintSet& c) {
  if (c.dim <= 0) throw std::invalid_argument("constraint set: dim must be positive");
  if (c.directions.size() != c.offsets.size())
    throw std::invalid_argument("constraint set: direction/offset count mismatch");
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.directions[i].size() != static_cast<std::size_t>(c.dim))
      throw std::invalid_argument("constraint set: direction dimension mismatch");
    if (!all_finite(c.directions[i]) || !std::isfinite(c.offsets[i]))
      throw std::invalid_argument("constraint set: non-finite entry");
  }
}

// Solves the SPD system M w = rhs in place by Cholesky. M is q x q row
// major with q <= dim, tiny. Returns false when a pivot collapses.
bool solve_spd(std::vector<double> M, std::vector<double> rhs, std::size_t q,
               std::vector<double>& w) {
  for (std::size_t k = 0; k < q; ++k) {
    double piv = M[k * q + k];
    for (std::size_t j = 0; j < k; ++j) piv -= M[k * q + j] * M[k * q + j];
    if (!(piv > 0.0)) return false;
    const double L = std::sqrt(piv);
    M[k * q + k] = L;
    for (std::size_t i = k + 1; i < q; ++i) {
      double v = M[i * q + k];
      for (std::size_t j = 0; j < k; ++j) v -= M[i * q + j] * M[k * q + j];
      M[i * q + k] = v / L;
    }
  }
  // forward then backward substitution
  for (std::size_t i = 0; i < q; ++i) {
    double v = rhs[i];
    for (std::size_t j = 0; j < i; ++j) v -= M[i * q + j] * rhs[j];
    rhs[i] = v / M[i * q + i];
  }
  w.assign(q, 0.0);
  for (std::size_t ii = q; ii-- > 0;) {
    double v = rhs[ii];
    for (std::size_t j = ii + 1; j < q; ++j) v -= M[j * q + ii] * w[j];
    w[ii] = v / M[ii * q + ii];
  }
  return true;
}

struct WorkingSet {
  // Rows surviving preprocessing, as indices into the original set.
  std::vector<std::size_t> rows;
  // Original index of a zero-direction row with positive offset, if any.
  std::size_t bad_zero_row = static_cast<std::size_t>(-1);
  bool infeasible_zero_row = false;
};

// Drops zero-direction rows (infeasible if their offset is positive) and
// collapses exact duplicate directions onto the largest offset.
WorkingSet preprocess(const ConstraintSet& c) {
  WorkingSet ws;
  const std::size_t n = c.size();
  double max_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_norm = std::max(max_norm, norm(c.directions[i]));
  const double zero_tol = 1e-13 * (1.0 + max_norm);
  const double scale = constraint_scale(c);

  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < n; ++i) {
    if (norm(c.directions[i]) <= zero_tol) {
      if (c.offsets[i] > kFeasTol * scale) {
        ws.bad_zero_row = i;
        ws.infeasible_zero_row = true;
        return ws;
      }
      continue;
    }
    keep.push_back(i);
  }
  // Collapse exact duplicates, keeping the binding (largest) offset.
  std::sort(keep.begin(), keep.end(), [&](std::size_t x, std::size_t y) {
    if (c.directions[x] != c.directions[y]) return c.directions[x] < c.directions[y];
    return c.offsets[x] > c.offsets[y];
  });
  for (std::size_t k = 0; k < keep.size(); ++k) {
    if (k > 0 && c.directions[keep[k]] == c.directions[keep[k - 1]]) continue;
    ws.rows.push_back(keep[k]);
  }
  std::sort(ws.rows.begin(), ws.rows.end());
  return ws;
}

}  // namespace

ConstraintSet build_potential_constraints(const Point& x, const GridSet& grid,
                                          double v_at_x,
                                          const std::vector<double>& v_at_grid) {
  if (auto err = validate(grid)) throw std::invalid_argument("grid: " + *err);
  if (x.size() != static_cast<std::size_t>(grid.dimension()))
    throw std::invalid_argument("point/grid dimension mismatch");
  if (v_at_grid.size() != grid.size())
    throw std::invalid_argument("grid value count mismatch");
  if (!std::isfinite(v_at_x)) throw std::invalid_argument("non-finite potential value");
  ConstraintSet c;
  c.dim = grid.dimension();
  c.directions.reserve(grid.size());
  c.offsets.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!std::isfinite(v_at_grid[i])) throw std::invalid_argument("non-finite grid value");
    c.directions.push_back(sub(x, grid.points[i]));
    c.offsets.push_back(v_at_x - v_at_grid[i]);
  }
  return c;
}

ConstraintSet build_interaction_constraints(std::size_t j,
                                            const std::vector<Point>& decision_points,
                                            const GridSet& grid,
                                            const PairwiseKernelValues& kernels) {
  if (auto err = validate(grid)) throw std::invalid_argument("grid: " + *err);
  const std::size_t m = decision_points.size();
  const std::size_t n = grid.size();
  if (j >= m) throw std::invalid_argument("decision point index out of range");
  if (kernels.xx.size() != m || kernels.zz.size() != n)
    throw std::invalid_argument("kernel table size mismatch");
  for (const auto& row : kernels.xx)
    if (row.size() != m) throw std::invalid_argument("kernel table xx is not m x m");
  for (const auto& row : kernels.zz)
    if (row.size() != n) throw std::invalid_argument("kernel table zz is not n x n");

  double mean_xx = 0.0;
  for (std::size_t k = 0; k < m; ++k) mean_xx += kernels.xx[j][k];
  mean_xx /= static_cast<double>(m);

  ConstraintSet c;
  c.dim = grid.dimension();
  for (std::size_t i = 0; i < n; ++i) {
    double min_zz = kernels.zz[i][0];
    for (std::size_t k = 1; k < n; ++k) min_zz = std::min(min_zz, kernels.zz[i][k]);
    c.directions.push_back(sub(decision_points[j], grid.points[i]));
    c.offsets.push_back(mean_xx - min_zz);
  }
  return c;
}

SelectionOutcome min_norm_select(const ConstraintSet& c) {
  check_constraints(c);
  const std::size_t n = c.size();
  const std::size_t d = static_cast<std::size_t>(c.dim);
  const double scale = constraint_scale(c);

  SelectionOutcome out;
  out.multipliers.assign(n, 0.0);

  const WorkingSet ws = preprocess(c);
  if (ws.infeasible_zero_row) {
    out.status = SelectionOutcome::Status::Infeasible;
    out.farkas.assign(n, 0.0);
    out.farkas[ws.bad_zero_row] = 1.0;
    out.multipliers.clear();
    return out;
  }

  const std::vector<std::size_t>& rows = ws.rows;
  Vec xi(d, 0.0);
  std::vector<std::size_t> active;   // indices into rows
  std::vector<double> lambda;        // matching active
  const double viol_tol = 1e-12 * scale;

  std::size_t guard = 100 * (rows.size() + d + 4);
  while (true) {
    if (guard-- == 0) throw std::runtime_error("min_norm_select: iteration guard tripped");

    // Most violated constraint.
    std::size_t p = rows.size();
    double worst = viol_tol;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const std::size_t i = rows[k];
      const double v = c.offsets[i] - dot(c.directions[i], xi);
      if (v > worst) {
        worst = v;
        p = k;
      }
    }
    if (p == rows.size()) break;  // feasible

    const Vec& ap = c.directions[rows[p]];
    double lam_in = 0.0;  // multiplier accumulated by the incoming constraint

    // Inner loop: bring constraint p into the active set, dropping blockers.
    while (true) {
      if (guard-- == 0) throw std::runtime_error("min_norm_select: iteration guard tripped");
      const std::size_t q = active.size();

      // r = (N^T N)^{-1} N^T a_p, z = a_p - N r.
      std::vector<double> r(q, 0.0);
      Vec z = ap;
      bool dependent = false;
      if (q > 0) {
        std::vector<double> M(q * q);
        std::vector<double> rhs(q);
        for (std::size_t a = 0; a < q; ++a) {
          const Vec& na = c.directions[rows[active[a]]];
          rhs[a] = dot(na, ap);
          for (std::size_t b = 0; b <= a; ++b) {
            const double v = dot(na, c.directions[rows[active[b]]]);
            M[a * q + b] = v;
            M[b * q + a] = v;
          }
        }
        if (!solve_spd(M, rhs, q, r))
          throw std::runtime_error("min_norm_select: active set lost rank");
        for (std::size_t a = 0; a < q; ++a) axpy(-r[a], c.directions[rows[active[a]]], z);
      }
      const double zz = norm_sq(z);
      dependent = zz <= kDependenceTol * (1.0 + norm_sq(ap));

      // Dual step length from blocking constraints.
      double t1 = std::numeric_limits<double>::infinity();
      std::size_t blocker = q;
      for (std::size_t a = 0; a < q; ++a)
        if (r[a] > 1e-14) {
          const double t = lambda[a] / r[a];
          if (t < t1) {
            t1 = t;
            blocker = a;
          }
        }

      if (dependent) {
        if (blocker == q) {
          // Farkas certificate: a_p = N r with r <= 0, and the active
          // equalities give b_p - r . b_A = current violation > 0.
          out.status = SelectionOutcome::Status::Infeasible;
          out.farkas.assign(n, 0.0);
          out.farkas[rows[p]] = 1.0;
          for (std::size_t a = 0; a < q; ++a)
            out.farkas[rows[active[a]]] = std::max(0.0, -r[a]);
          out.multipliers.clear();
          return out;
        }
        // Partial step in the dual only; xi is unchanged since z = 0.
        const double t = t1;
        for (std::size_t a = 0; a < q; ++a) lambda[a] -= t * r[a];
        lam_in += t;
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(blocker));
        lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(blocker));
        continue;
      }

      const double viol = c.offsets[rows[p]] - dot(ap, xi);
      if (viol <= viol_tol) break;  // satisfied while dropping blockers
      const double t2 = viol / zz;
      const double t = std::min(t1, t2);
      axpy(t, z, xi);
      for (std::size_t a = 0; a < q; ++a) lambda[a] -= t * r[a];
      lam_in += t;
      if (t2 <= t1) {
        active.push_back(p);
        lambda.push_back(lam_in);
        break;
      }
      active.erase(active.begin() + static_cast<std::ptrdiff_t>(blocker));
      lambda.erase(lambda.begin() + static_cast<std::ptrdiff_t>(blocker));
    }
  }

  out.status = SelectionOutcome::Status::Feasible;
  out.xi = xi;
  for (std::size_t a = 0; a < active.size(); ++a)
    out.multipliers[rows[active[a]]] = std::max(0.0, lambda[a]);
  out.farkas.clear();

  // Defensive KKT verification.
  Vec recon(d, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    if (out.multipliers[i] != 0.0) axpy(out.multipliers[i], c.directions[i], recon);
  for (std::size_t k = 0; k < d; ++k)
    if (std::abs(recon[k] - xi[k]) > kComplementTol * scale)
      throw std::runtime_error("min_norm_select: stationarity check failed");
  for (std::size_t i = 0; i < n; ++i)
    if (c.offsets[i] - dot(c.directions[i], xi) > kFeasTol * scale)
      throw std::runtime_error("min_norm_select: feasibility check failed");
  return out;
}

RelaxedOutcome relaxed_select(const ConstraintSet& c, double eta) {
  check_constraints(c);
  if (!(eta > 0.0) || !std::isfinite(eta))
    throw std::invalid_argument("relaxed_select: eta must be positive");
  const double cap = 1.0 / eta;

  ConstraintSet cs = c;  // offsets mutated in place across bisection solves
  auto admissible = [&](double s, SelectionOutcome& sol) {
    for (std::size_t i = 0; i < c.size(); ++i) cs.offsets[i] = c.offsets[i] - s;
    sol = min_norm_select(cs);
    if (!sol.feasible()) return false;
    const double total =
        std::accumulate(sol.multipliers.begin(), sol.multipliers.end(), 0.0);
    return total <= cap * (1.0 + 1e-9) + 1e-12;
  };

  RelaxedOutcome out;
  SelectionOutcome sol;
  if (admissible(0.0, sol)) {
    out.xi = sol.xi;
    out.slack = 0.0;
    out.multipliers = sol.multipliers;
    return out;
  }

  double hi = 0.0;
  for (double b : c.offsets) hi = std::max(hi, b);
  double lo = 0.0;
  // hi relaxes every offset to zero or below, so xi = 0 is admissible there.
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (admissible(mid, sol))
      hi = mid;
    else
      lo = mid;
  }
  if (!admissible(hi, sol)) throw std::runtime_error("relaxed_select: bisection failed");
  out.xi = sol.xi;
  out.multipliers = sol.multipliers;
  double s = 0.0;
  for (std::size_t i = 0; i < c.size(); ++i)
    s = std::max(s, c.offsets[i] - dot(c.directions[i], out.xi));
  out.slack = s;
  return out;
}

SelectionOutcome oracle_min_norm(const ConstraintSet& c) {
  check_constraints(c);
  const std::size_t n = c.size();
  const std::size_t d = static_cast<std::size_t>(c.dim);
  if (n > 12 || d > 4)
    throw std::invalid_argument("oracle_min_norm: budget is n <= 12, dim <= 4");
  const double scale = constraint_scale(c);

  SelectionOutcome out;

  // Zero directions handled directly, independent of the solver path.
  double max_norm = 0.0;
  for (std::size_t i = 0; i < n; ++i) max_norm = std::max(max_norm, norm(c.directions[i]));
  const double zero_tol = 1e-13 * (1.0 + max_norm);
  std::vector<std::size_t> live;
  for (std::size_t i = 0; i < n; ++i) {
    if (norm(c.directions[i]) <= zero_tol) {
      if (c.offsets[i] > kFeasTol * scale) {
        out.status = SelectionOutcome::Status::Infeasible;
        out.farkas.assign(n, 0.0);
        out.farkas[i] = 1.0;
        return out;
      }
      continue;
    }
    live.push_back(i);
  }

  const std::size_t ln = live.size();
  bool found = false;
  double best = std::numeric_limits<double>::infinity();
  Vec best_xi;
  std::vector<double> best_mult;

  // Gaussian elimination with partial pivoting on the tiny Gram system.
  auto solve_dense = [](std::vector<double> M, std::vector<double> rhs, std::size_t q,
                        std::vector<double>& w) {
    std::vector<std::size_t> perm(q);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t k = 0; k < q; ++k) {
      std::size_t piv = k;
      for (std::size_t i = k + 1; i < q; ++i)
        if (std::abs(M[i * q + k]) > std::abs(M[piv * q + k])) piv = i;
      if (std::abs(M[piv * q + k]) < 1e-12) return false;
      if (piv != k) {
        for (std::size_t j = 0; j < q; ++j) std::swap(M[piv * q + j], M[k * q + j]);
        std::swap(rhs[piv], rhs[k]);
      }
      for (std::size_t i = k + 1; i < q; ++i) {
        const double f = M[i * q + k] / M[k * q + k];
        for (std::size_t j = k; j < q; ++j) M[i * q + j] -= f * M[k * q + j];
        rhs[i] -= f * rhs[k];
      }
    }
    w.assign(q, 0.0);
    for (std::size_t ii = q; ii-- > 0;) {
      double v = rhs[ii];
      for (std::size_t j = ii + 1; j < q; ++j) v -= M[ii * q + j] * w[j];
      w[ii] = v / M[ii * q + ii];
    }
    return true;
  };

  for (std::uint32_t mask = 0; mask < (1u << ln); ++mask) {
    std::vector<std::size_t> S;
    for (std::size_t k = 0; k < ln; ++k)
      if (mask & (1u << k)) S.push_back(live[k]);
    if (S.size() > d) continue;
    const std::size_t q = S.size();

    Vec xi(d, 0.0);
    std::vector<double> w;
    if (q > 0) {
      std::vector<double> M(q * q);
      std::vector<double> rhs(q);
      for (std::size_t a = 0; a < q; ++a) {
        rhs[a] = c.offsets[S[a]];
        for (std::size_t b = 0; b < q; ++b)
          M[a * q + b] = dot(c.directions[S[a]], c.directions[S[b]]);
      }
      if (!solve_dense(M, rhs, q, w)) continue;
      bool sign_ok = true;
      for (double v : w)
        if (v < -1e-9) {
          sign_ok = false;
          break;
        }
      if (!sign_ok) continue;
      for (std::size_t a = 0; a < q; ++a) axpy(w[a], c.directions[S[a]], xi);
    }
    bool feas = true;
    for (std::size_t i = 0; i < n && feas; ++i)
      if (dot(c.directions[i], xi) < c.offsets[i] - kFeasTol * scale) feas = false;
    if (!feas) continue;
    const double val = norm_sq(xi);
    if (!found || val < best) {
      found = true;
      best = val;
      best_xi = xi;
      best_mult.assign(n, 0.0);
      for (std::size_t a = 0; a < q; ++a) best_mult[S[a]] = std::max(0.0, w[a]);
    }
  }

  if (found) {
    out.status = SelectionOutcome::Status::Feasible;
    out.xi = best_xi;
    out.multipliers = best_mult;
  } else {
    out.status = SelectionOutcome::Status::Infeasible;
  }
  return out;
}

}  // namespace olt

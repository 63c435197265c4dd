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

#include "olt/environments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace olt {
namespace {

thread_local int g_guard_depth = 0;

std::map<std::string, std::function<double(const Vec&)>>& kernel_registry() {
  static std::map<std::string, std::function<double(const Vec&)>> reg;
  return reg;
}

std::mutex& kernel_registry_mutex() {
  static std::mutex m;
  return m;
}

void require_round(int t) {
  if (t < 1) throw std::invalid_argument("round index must be at least 1");
}

double wshape_value(double a, double x) {
  const double s = x < 0.0 ? x + 1.0 : x - 1.0;
  return a * s * s;
}

// Evaluation that bypasses the oracle guard; only reveal() and
// eval_potential() may call this.
double raw_potential(const Scenario& sc, int t, const Point& x) {
  require_round(t);
  if (const auto* mq = std::get_if<MovingQuadratic>(&sc)) return dist_sq(x, mq->target(t));
  if (const auto* mn = std::get_if<MinOfQuadratics>(&sc))
    return std::min(dist_sq(x, mn->u_target(t)), dist_sq(x, mn->v_target(t)));
  if (const auto* ws = std::get_if<WShapePotential>(&sc)) {
    if (x.size() != 1)
      throw std::invalid_argument("double-well potential is one-dimensional");
    return wshape_value(ws->amplitude_at(t), x[0]);
  }
  throw std::invalid_argument("scenario has no pointwise potential");
}

}  // namespace

Point MovingQuadratic::target(int t) const {
  require_round(t);
  Point u = start;
  axpy(static_cast<double>(t - 1), drift, u);
  return u;
}

Point MinOfQuadratics::u_target(int t) const {
  require_round(t);
  Point u = u_start;
  axpy(static_cast<double>(t - 1), u_drift, u);
  return u;
}

Point MinOfQuadratics::v_target(int t) const {
  require_round(t);
  Point v = v_start;
  axpy(static_cast<double>(t - 1), v_drift, v);
  return v;
}

double WShapePotential::amplitude_at(int t) const {
  require_round(t);
  double a = amplitude;
  if (!amplitudes.empty()) {
    if (static_cast<std::size_t>(t) > amplitudes.size())
      throw std::out_of_range("amplitude schedule shorter than requested round");
    a = amplitudes[static_cast<std::size_t>(t - 1)];
  }
  if (!(a >= floor) || !(floor > 0.0))
    throw std::invalid_argument("double-well amplitude below its positive floor");
  return a;
}

void register_interaction_kernel(const std::string& name,
                                 std::function<double(const Vec&)> fn) {
  if (!fn) throw std::invalid_argument("kernel function must be callable");
  std::lock_guard<std::mutex> lock(kernel_registry_mutex());
  kernel_registry()[name] = std::move(fn);
}

double kernel_value(const InteractionKernel& kernel, const Vec& u) {
  if (std::holds_alternative<QuadraticKernel>(kernel)) return norm_sq(u);
  if (std::holds_alternative<ZeroKernel>(kernel)) return 0.0;
  const auto& named = std::get<NamedKernel>(kernel);
  std::lock_guard<std::mutex> lock(kernel_registry_mutex());
  auto it = kernel_registry().find(named.name);
  if (it == kernel_registry().end())
    throw std::invalid_argument("unknown interaction kernel: " + named.name);
  return it->second(u);
}

bool is_interaction(const Scenario& sc) {
  return std::holds_alternative<InteractionScenario>(sc);
}

std::optional<std::string> validate(const Scenario& sc, int dim) {
  if (dim <= 0) return "dimension must be positive";
  const std::size_t d = static_cast<std::size_t>(dim);
  if (const auto* mq = std::get_if<MovingQuadratic>(&sc)) {
    if (mq->start.size() != d || mq->drift.size() != d) return "target dimension mismatch";
    if (!all_finite(mq->start) || !all_finite(mq->drift)) return "non-finite target data";
    return std::nullopt;
  }
  if (const auto* mn = std::get_if<MinOfQuadratics>(&sc)) {
    if (mn->u_start.size() != d || mn->u_drift.size() != d || mn->v_start.size() != d ||
        mn->v_drift.size() != d)
      return "target dimension mismatch";
    if (!all_finite(mn->u_start) || !all_finite(mn->u_drift) || !all_finite(mn->v_start) ||
        !all_finite(mn->v_drift))
      return "non-finite target data";
    return std::nullopt;
  }
  if (const auto* ws = std::get_if<WShapePotential>(&sc)) {
    if (dim != 1) return "double-well potential requires dimension one";
    if (!(ws->floor > 0.0)) return "amplitude floor must be positive";
    if (ws->amplitudes.empty() && !(ws->amplitude >= ws->floor))
      return "amplitude below floor";
    for (double a : ws->amplitudes)
      if (!std::isfinite(a) || a < ws->floor) return "amplitude below floor";
    return std::nullopt;
  }
  return std::nullopt;  // interaction kernels carry no dimension data
}

OracleView reveal(const Scenario& sc, int t, const std::vector<Point>& decision_points,
                  const GridSet& grid) {
  require_round(t);
  if (auto err = validate(grid)) throw std::invalid_argument("grid: " + *err);
  if (decision_points.empty()) throw std::invalid_argument("no decision points");
  for (const Point& x : decision_points)
    if (x.size() != static_cast<std::size_t>(grid.dimension()))
      throw std::invalid_argument("decision point dimension mismatch");

  OracleView view;
  view.round = t;

  if (const auto* in = std::get_if<InteractionScenario>(&sc)) {
    view.interaction = true;
    const std::size_t m = decision_points.size();
    const std::size_t n = grid.size();
    view.kernels.xx.assign(m, std::vector<double>(m));
    view.kernels.zz.assign(n, std::vector<double>(n));
    view.kernels.xz.assign(m, std::vector<double>(n));
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < m; ++k)
        view.kernels.xx[j][k] = kernel_value(in->kernel, sub(decision_points[j], decision_points[k]));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k)
        view.kernels.zz[i][k] = kernel_value(in->kernel, sub(grid.points[i], grid.points[k]));
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t i = 0; i < n; ++i)
        view.kernels.xz[j][i] = kernel_value(in->kernel, sub(decision_points[j], grid.points[i]));
    return view;
  }

  view.values_at_points.reserve(decision_points.size());
  for (const Point& x : decision_points)
    view.values_at_points.push_back(raw_potential(sc, t, x));
  view.values_at_grid.reserve(grid.size());
  for (const Point& z : grid.points) view.values_at_grid.push_back(raw_potential(sc, t, z));
  return view;
}

double eval_potential(const Scenario& sc, int t, const Point& x) {
  if (OracleGuard::active())
    throw std::logic_error(
        "eval_potential called inside an algorithm round; algorithms may only "
        "use the revealed view");
  return raw_potential(sc, t, x);
}

OracleGuard::OracleGuard() { ++g_guard_depth; }
OracleGuard::~OracleGuard() { --g_guard_depth; }
bool OracleGuard::active() { return g_guard_depth > 0; }

namespace {

// Supremum of |x - u|^2 over the region: farthest point is closed-form for
// balls and coordinatewise for boxes.
double sup_dist_sq(const Point& u, const DomainSpec& region) {
  if (region.kind == DomainSpec::Kind::Ball) {
    const double d = std::sqrt(dist_sq(u, region.center));
    return (d + region.radius) * (d + region.radius);
  }
  double s = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    const double a = region.lo[k] - u[k];
    const double b = region.hi[k] - u[k];
    s += std::max(a * a, b * b);
  }
  return s;
}

// Candidate maximizers of min(|x-u|^2, |x-v|^2) over the region: farthest
// points from each target plus the intersections of the bisector with the
// region boundary. Exact for balls and boxes in dimensions one and two.
std::vector<Point> min_quad_candidates(const Point& u, const Point& v,
                                       const DomainSpec& region) {
  const std::size_t d = u.size();
  std::vector<Point> cand;

  auto far_point_ball = [&](const Point& w) {
    const double dist = std::sqrt(dist_sq(w, region.center));
    Point p = region.center;
    if (dist > 0.0) {
      const double f = region.radius / dist;
      for (std::size_t k = 0; k < d; ++k) p[k] += f * (region.center[k] - w[k]);
    } else {
      p[0] += region.radius;
    }
    return p;
  };
  auto far_point_box = [&](const Point& w) {
    Point p(d);
    for (std::size_t k = 0; k < d; ++k) {
      const double a = region.lo[k] - w[k];
      const double b = region.hi[k] - w[k];
      p[k] = (a * a >= b * b) ? region.lo[k] : region.hi[k];
    }
    return p;
  };

  if (region.kind == DomainSpec::Kind::Ball) {
    cand.push_back(far_point_ball(u));
    cand.push_back(far_point_ball(v));
  } else {
    cand.push_back(far_point_box(u));
    cand.push_back(far_point_box(v));
    if (d == 2) {
      cand.push_back(Point{region.lo[0], region.lo[1]});
      cand.push_back(Point{region.lo[0], region.hi[1]});
      cand.push_back(Point{region.hi[0], region.lo[1]});
      cand.push_back(Point{region.hi[0], region.hi[1]});
    }
  }

  Vec w = sub(v, u);
  const double wn = norm(w);
  if (wn == 0.0) return cand;  // identical targets: min is a single bowl
  Vec nhat = scaled(w, 1.0 / wn);
  // Bisector hyperplane {x : <x, nhat> = q}.
  const double q = (norm_sq(v) - norm_sq(u)) / (2.0 * wn);

  if (region.kind == DomainSpec::Kind::Ball) {
    const double h = q - dot(region.center, nhat);
    if (std::abs(h) <= region.radius) {
      Point cprime = region.center;
      axpy(h, nhat, cprime);
      if (d == 1) {
        cand.push_back(cprime);
      } else {
        const double rp = std::sqrt(std::max(0.0, region.radius * region.radius - h * h));
        Vec that{-nhat[1], nhat[0]};
        Point p1 = cprime, p2 = cprime;
        axpy(rp, that, p1);
        axpy(-rp, that, p2);
        cand.push_back(p1);
        cand.push_back(p2);
      }
    }
  } else {
    if (d == 1) {
      const double x0 = q / nhat[0];
      if (x0 >= region.lo[0] && x0 <= region.hi[0]) cand.push_back(Point{x0});
    } else {
      const Point corners[4] = {{region.lo[0], region.lo[1]},
                                {region.hi[0], region.lo[1]},
                                {region.hi[0], region.hi[1]},
                                {region.lo[0], region.hi[1]}};
      for (int e = 0; e < 4; ++e) {
        const Point& A = corners[e];
        const Point& B = corners[(e + 1) % 4];
        const double denom = dot(sub(B, A), nhat);
        if (denom == 0.0) continue;
        const double s = (q - dot(A, nhat)) / denom;
        if (s >= 0.0 && s <= 1.0) {
          Point p = A;
          axpy(s, sub(B, A), p);
          cand.push_back(p);
        }
      }
    }
  }
  return cand;
}

}  // namespace

double sup_abs_bound(const Scenario& sc, int horizon, const DomainSpec& region) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");

  if (const auto* in = std::get_if<InteractionScenario>(&sc)) {
    if (std::holds_alternative<ZeroKernel>(in->kernel)) return 0.0;
    if (!region.bounded())
      throw std::invalid_argument("cannot bound kernel over an unbounded region");
    if (std::holds_alternative<QuadraticKernel>(in->kernel)) {
      if (region.kind == DomainSpec::Kind::Ball) {
        const double dm = 2.0 * region.radius;
        return dm * dm;
      }
      double s = 0.0;
      for (std::size_t k = 0; k < region.lo.size(); ++k) {
        const double e = region.hi[k] - region.lo[k];
        s += e * e;
      }
      return s;
    }
    throw std::invalid_argument("cannot bound a named kernel in closed form");
  }

  if (!region.bounded())
    throw std::invalid_argument("cannot bound an unbounded potential over the whole space");

  double best = 0.0;
  for (int t = 1; t <= horizon; ++t) {
    if (const auto* mq = std::get_if<MovingQuadratic>(&sc)) {
      best = std::max(best, sup_dist_sq(mq->target(t), region));
    } else if (const auto* mn = std::get_if<MinOfQuadratics>(&sc)) {
      const Point u = mn->u_target(t);
      const Point v = mn->v_target(t);
      if (u.size() > 2)
        throw std::invalid_argument(
            "exact bound for a two-bowl minimum is implemented for dimensions one and two");
      for (const Point& p : min_quad_candidates(u, v, region)) {
        const Point pp = project(p, region);  // guard floating drift
        best = std::max(best, std::min(dist_sq(pp, u), dist_sq(pp, v)));
      }
    } else if (const auto* ws = std::get_if<WShapePotential>(&sc)) {
      double lo, hi;
      if (region.kind == DomainSpec::Kind::Ball) {
        if (region.center.size() != 1)
          throw std::invalid_argument("double-well potential is one-dimensional");
        lo = region.center[0] - region.radius;
        hi = region.center[0] + region.radius;
      } else {
        if (region.lo.size() != 1)
          throw std::invalid_argument("double-well potential is one-dimensional");
        lo = region.lo[0];
        hi = region.hi[0];
      }
      double shape = std::max(wshape_value(1.0, lo), wshape_value(1.0, hi));
      if (lo <= 0.0 && hi >= 0.0) shape = std::max(shape, 1.0);
      best = std::max(best, ws->amplitude_at(t) * shape);
    } else {
      throw std::invalid_argument("scenario has no pointwise potential");
    }
  }
  return best;
}

}  // namespace olt

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

#include "olt/domain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace olt {

DomainSpec DomainSpec::whole_space() { return DomainSpec{}; }

DomainSpec DomainSpec::ball(Point center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("ball domain: radius must be positive");
  if (center.empty() || !all_finite(center))
    throw std::invalid_argument("ball domain: bad center");
  DomainSpec d;
  d.kind = Kind::Ball;
  d.center = std::move(center);
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::box(Vec lo, Vec hi) {
  if (lo.size() != hi.size() || lo.empty())
    throw std::invalid_argument("box domain: bound dimension mismatch");
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (!(lo[k] <= hi[k]) || !std::isfinite(lo[k]) || !std::isfinite(hi[k]))
      throw std::invalid_argument("box domain: requires lo <= hi and finite bounds");
  DomainSpec d;
  d.kind = Kind::Box;
  d.lo = std::move(lo);
  d.hi = std::move(hi);
  return d;
}

Point project(const Point& p, const DomainSpec& dom) {
  switch (dom.kind) {
    case DomainSpec::Kind::WholeSpace:
      return p;
    case DomainSpec::Kind::Ball: {
      if (p.size() != dom.center.size())
        throw std::invalid_argument("project: point/ball dimension mismatch");
      const double d = std::sqrt(dist_sq(p, dom.center));
      if (d <= dom.radius) return p;
      Point q = dom.center;
      const double f = dom.radius / d;
      for (std::size_t k = 0; k < p.size(); ++k) q[k] += f * (p[k] - dom.center[k]);
      return q;
    }
    case DomainSpec::Kind::Box: {
      if (p.size() != dom.lo.size())
        throw std::invalid_argument("project: point/box dimension mismatch");
      Point q(p.size());
      for (std::size_t k = 0; k < p.size(); ++k)
        q[k] = std::min(dom.hi[k], std::max(dom.lo[k], p[k]));
      return q;
    }
  }
  throw std::logic_error("project: unknown domain kind");
}

bool contains(const Point& p, const DomainSpec& dom, double tol) {
  switch (dom.kind) {
    case DomainSpec::Kind::WholeSpace:
      return true;
    case DomainSpec::Kind::Ball:
      return std::sqrt(dist_sq(p, dom.center)) <= dom.radius + tol;
    case DomainSpec::Kind::Box:
      for (std::size_t k = 0; k < p.size(); ++k)
        if (p[k] < dom.lo[k] - tol || p[k] > dom.hi[k] + tol) return false;
      return true;
  }
  throw std::logic_error("contains: unknown domain kind");
}

}  // namespace olt

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

#include "olt/vec.hpp"

namespace olt {

// Closed convex region the decision points are confined to.
struct DomainSpec {
  enum class Kind { WholeSpace, Ball, Box };
  Kind kind = Kind::WholeSpace;
  Point center;         // Ball
  double radius = 0.0;  // Ball
  Vec lo, hi;           // Box

  static DomainSpec whole_space();
  static DomainSpec ball(Point center, double radius);
  static DomainSpec box(Vec lo, Vec hi);

  bool bounded() const { return kind != Kind::WholeSpace; }
};

// Euclidean projection onto the domain. Identity for WholeSpace; radial
// rescale for Ball; coordinatewise clamp for Box.
Point project(const Point& p, const DomainSpec& dom);

// Membership up to an additive tolerance on the defining inequalities.
bool contains(const Point& p, const DomainSpec& dom, double tol);

}  // namespace olt

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
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olt/vec.hpp"

namespace olt {

// Finitely supported probability measure: atoms with nonnegative weights
// summing to one. Atom locations may repeat.
struct DiscreteMeasure {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  int dimension() const;

  static DiscreteMeasure uniform(std::vector<Point> pts);
  static DiscreteMeasure dirac(Point p);
};

// Finite candidate-location set revealed to the player. Points must be
// pairwise distinct and share one dimension.
struct GridSet {
  std::vector<Point> points;

  std::size_t size() const { return points.size(); }
  int dimension() const;
};

// Returns std::nullopt when valid, otherwise a description of the first
// violated invariant.
std::optional<std::string> validate(const DiscreteMeasure& mu);
std::optional<std::string> validate(const GridSet& grid);

// Transport plan between the nonzero atoms of two measures, stored dense
// row-major. Rows index mu atoms, columns index nu atoms.
struct Coupling {
  std::vector<Point> row_points;
  std::vector<double> row_weights;
  std::vector<Point> col_points;
  std::vector<double> col_weights;
  std::vector<double> plan;  // rows() * cols(), row-major

  std::size_t rows() const { return row_points.size(); }
  std::size_t cols() const { return col_points.size(); }
  double mass(std::size_t j, std::size_t i) const { return plan[j * cols() + i]; }

  // Transport cost sum_{j,i} plan(j,i) * |x_j - y_i|^2.
  double cost() const;

  // {"rows": r, "cols": c, "entries": [[j, i, mass], ...]} with only the
  // strictly positive entries listed.
  nlohmann::json to_json() const;
};

// Squared 2-Wasserstein distance between discrete measures. Exact up to
// floating arithmetic: computed from an optimal coupling.
double w2_squared(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// An optimal coupling for the squared-distance cost. The returned plan has
// marginals matching the (zero-atom-stripped) input weights within
// kMarginalTol and at most rows + cols - 1 nonzero entries.
Coupling optimal_coupling(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

}  // namespace olt

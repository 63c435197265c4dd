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

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "olt/algorithms.hpp"
#include "olt/analysis.hpp"
#include "olt/environments.hpp"
#include "olt/measures.hpp"

namespace olt {

// Invalid configuration data. The CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Candidate-location grid: explicit points, or the lattice of pitch
// 2*half_extent/(axis_points-1) over the square, clipped to the closed disk.
struct GridSpec {
  enum class Kind { Explicit, DiskLattice };
  Kind kind = Kind::Explicit;
  std::vector<Point> points;  // Explicit
  int axis_points = 0;        // DiskLattice
  double half_extent = 1.0;
  double radius = 1.0;
  std::size_t expect_count = 0;  // 0 = unchecked

  GridSet build() const;
};

// Initial decision points: explicit, or seeded uniform over a ball or box.
struct InitSpec {
  enum class Kind { Explicit, UniformBall, UniformBox };
  Kind kind = Kind::Explicit;
  std::vector<Point> points;
  Point center;
  double radius = 1.0;
  Vec lo, hi;

  std::vector<Point> build(int m, std::uint64_t seed) const;
};

struct ReferencePolicy {
  ReferenceKind kind = ReferenceKind::BestGridDirac;
  std::vector<double> user_weights;  // UserSupplied only
};

struct RunConfig {
  int schema_version = 1;
  std::string name;
  Scenario scenario;
  GridSpec grid;
  int m = 1;
  InitSpec init;
  Variant variant = Variant::MinimalSelection;
  double eta = 0.1;
  int rounds = 1;
  std::uint64_t seed = 1;
  DomainSpec domain;
  ReferencePolicy reference;
  bool check_uniform_reference = true;
  int replicates = 1;
  std::string out_dir;

  static RunConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

// One verified inequality: which bound, against which reference, evaluated
// over which horizon.
struct BoundCheckRow {
  std::string bound;      // "telescoped_potential", "exploration", ...
  std::string reference;  // "best_grid_dirac", "uniform_grid", "user"
  int horizon = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  double min_slack = 0.0;  // worst rhs + tol - lhs over checked prefixes
  bool pass = false;
  std::string note;
};

struct RunRecord {
  RunConfig config;
  std::uint64_t seed = 0;  // replicate seed actually used
  std::vector<StepReport> reports;
  std::vector<std::vector<Point>> trajectory;  // states entering rounds 1..T+1
  std::map<std::string, RegretLedger> ledgers; // keyed by reference name
  std::vector<BoundCheckRow> bound_checks;
  double wall_seconds = 0.0;
  std::string version;

  const RegretLedger& primary_ledger() const;
  nlohmann::json to_json() const;
};

// Executes one replicate with the given seed override (config.seed if the
// caller passes it). Throws ConfigError on invalid configs and propagates
// InfeasiblePointError from variants without a fallback.
RunRecord run_single(const RunConfig& config, std::uint64_t seed);

// Runs config.replicates replicates concurrently, seeds derived from
// config.seed, and optionally writes per-replicate outputs under out_dir.
struct EnsembleResult {
  std::vector<RunRecord> records;
  std::vector<BoundCheckRow> checks;  // ensemble-level verification
};
EnsembleResult run_ensemble(const RunConfig& config);

// record.json, ledger.csv (primary reference), snapshots.json.
void write_outputs(const RunRecord& record, const std::string& dir);

// Deterministic bound table for one record: prefix-swept inequalities for
// the variants with per-path bounds. Exploration runs need an ensemble.
std::vector<BoundCheckRow> verify_bounds(const RunRecord& record);

// Ensemble verification: per-path rows where applicable plus the
// sample-mean exploration check (needs at least two records).
std::vector<BoundCheckRow> verify_bounds(const std::vector<RunRecord>& records);

// Reads record.json (or rep_*/record.json) files under a directory and
// reconstructs enough of each record to re-run verification.
std::vector<RunRecord> load_records(const std::string& dir);

std::vector<std::string> preset_names();
RunConfig preset(const std::string& name);

struct OracleReport {
  int qp_count = 0;
  int qp_agree = 0;
  double qp_max_xi_diff = 0.0;
  int w2_count = 0;
  double w2_max_diff = 0.0;
  bool pass = true;
  std::uint64_t digest = 0;  // stable within one build of one toolchain
};

// Cross-checks the solver against enumeration and the transport solver
// against permutation brute force on seeded random instances.
OracleReport oracle_suite(std::uint64_t seed, int count);

// 17-significant-digit decimal rendering used by every emitter.
std::string format_double(double v);

const char* variant_name(Variant v);
const char* reference_name(ReferenceKind k);

}  // namespace olt

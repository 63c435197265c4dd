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

// Release gate: eleven end-to-end checks, one line each, exit 0 only when
// every check passes. Each check is self-contained apart from a few scalar
// results shared between them (noted inline).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "olt/harness.hpp"
#include "olt/oracles.hpp"

using namespace olt;

namespace {

constexpr std::uint64_t kGateSeed = 2026;

// Frozen after the first pilot run of the tracking preset (measured max
// distance 0.3305 after the final round). The run is fully seeded, so any
// drift past this ceiling signals a behavior change, not noise.
constexpr double kTrackingThreshold = 0.34;

struct GateLine {
  int id = 0;
  bool pass = false;
  double secs = 0.0;
  std::string title;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

GateLine run_gate(int id, const std::string& title,
                  const std::function<std::pair<bool, std::string>()>& body) {
  GateLine line;
  line.id = id;
  line.title = title;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    auto [ok, detail] = body();
    line.pass = ok;
    line.detail = std::move(detail);
  } catch (const std::exception& e) {
    line.pass = false;
    line.detail = std::string("exception: ") + e.what();
  }
  line.secs = seconds_since(t0);
  return line;
}

std::string fmt(const char* pattern, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, v);
  return buf;
}

Point random_point(RngStream& rng, int d, double half) {
  Point p(static_cast<std::size_t>(d));
  for (auto& v : p) v = rng.uniform(-half, half);
  return p;
}

bool all_rows_pass(const std::vector<BoundCheckRow>& rows, std::size_t expect,
                   const std::string& bound, std::string* why) {
  if (rows.size() != expect) {
    *why = "expected " + std::to_string(expect) + " bound rows, got " +
           std::to_string(rows.size());
    return false;
  }
  for (const auto& r : rows) {
    if (r.bound != bound) {
      *why = "unexpected bound kind " + r.bound;
      return false;
    }
    if (!r.pass) {
      *why = r.bound + "/" + r.reference + " failed, min slack " + fmt("%.3g", r.min_slack);
      return false;
    }
  }
  return true;
}

// Small seeded convex-tracking run: explicit grid and starting points so the
// whole configuration derives from one stream.
RunConfig random_convex_config(std::uint64_t label, std::uint64_t index) {
  RngStream rng = RngStream::substream(kGateSeed, label, index);
  const int d = 1 + static_cast<int>(rng.next_u64() % 2);
  RunConfig cfg;
  cfg.name = "random-convex";
  MovingQuadratic mq;
  mq.start = random_point(rng, d, 0.6);
  mq.drift = random_point(rng, d, 0.25);
  cfg.scenario = mq;
  cfg.grid.kind = GridSpec::Kind::Explicit;
  const std::size_t n = 3 + rng.next_u64() % 5;
  for (std::size_t i = 0; i < n; ++i) cfg.grid.points.push_back(random_point(rng, d, 1.2));
  cfg.m = 1 + static_cast<int>(rng.next_u64() % 4);
  cfg.init.kind = InitSpec::Kind::Explicit;
  for (int j = 0; j < cfg.m; ++j) cfg.init.points.push_back(random_point(rng, d, 1.0));
  cfg.variant = Variant::MinimalSelection;
  cfg.eta = rng.uniform(0.05, 0.3);
  cfg.rounds = 3 + static_cast<int>(rng.next_u64() % 4);
  cfg.seed = 1;
  return cfg;
}

RunConfig random_nonconvex_config(std::uint64_t label, std::uint64_t index) {
  RngStream rng = RngStream::substream(kGateSeed, label, index);
  RunConfig cfg;
  cfg.name = "random-nonconvex";
  cfg.grid.kind = GridSpec::Kind::Explicit;
  cfg.init.kind = InitSpec::Kind::Explicit;
  if (index % 2 == 0) {
    const int d = 1 + static_cast<int>(rng.next_u64() % 2);
    MinOfQuadratics sc;
    sc.u_start = random_point(rng, d, 0.6);
    sc.u_drift = random_point(rng, d, 0.25);
    sc.v_start = random_point(rng, d, 0.6);
    sc.v_drift = random_point(rng, d, 0.25);
    cfg.scenario = sc;
    const std::size_t n = 3 + rng.next_u64() % 5;
    for (std::size_t i = 0; i < n; ++i) cfg.grid.points.push_back(random_point(rng, d, 1.2));
    cfg.m = 2 + static_cast<int>(rng.next_u64() % 3);
    for (int j = 0; j < cfg.m; ++j) cfg.init.points.push_back(random_point(rng, d, 1.0));
  } else {
    WShapePotential sc;
    sc.floor = 0.5;
    sc.amplitude = rng.uniform(0.5, 2.0);
    cfg.scenario = sc;
    const std::size_t n = 2 + rng.next_u64() % 4;
    for (std::size_t i = 0; i < n; ++i) cfg.grid.points.push_back(random_point(rng, 1, 1.3));
    cfg.m = 2 + static_cast<int>(rng.next_u64() % 4);
    for (int j = 0; j < cfg.m; ++j) cfg.init.points.push_back(random_point(rng, 1, 1.0));
  }
  cfg.variant = Variant::Relaxed;
  cfg.eta = rng.uniform(0.05, 0.25);
  cfg.rounds = 3 + static_cast<int>(rng.next_u64() % 4);
  cfg.seed = 1;
  return cfg;
}

std::string slurp_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Welford-free accumulator for mean and standard error of a sample.
struct MeanAcc {
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double se() const {
    const double m = mean();
    const double var = (sum_sq - static_cast<double>(n) * m * m) / static_cast<double>(n - 1);
    return std::sqrt(std::max(var, 0.0) / static_cast<double>(n));
  }
};

}  // namespace

int main() {
  std::vector<GateLine> lines;

  // Scalars shared across gates.
  std::optional<double> tracking_max_dist;        // gate 4 -> gate 10
  std::optional<int> nonconvex_first_infeasible;  // gate 8 -> gate 10
  bool nonconvex_completed = false;
  bool nonconvex_inside_disk = false;
  double shared_oracle_secs = 0.0;

  // 1. Minimum-norm solves against subset enumeration, and
  // 2. transport distances against permutation brute force. One seeded
  // suite covers both comparisons.
  OracleReport oracle;
  {
    const auto t0 = std::chrono::steady_clock::now();
    oracle = oracle_suite(kGateSeed, 1000);
    shared_oracle_secs = seconds_since(t0);
  }
  lines.push_back(run_gate(1, "solver matches enumeration on random systems", [&] {
    const bool ok =
        oracle.qp_count == 1000 && oracle.qp_agree == 1000 && shared_oracle_secs < 10.0;
    return std::make_pair(ok, std::to_string(oracle.qp_agree) + "/1000 agree, max xi gap " +
                                  fmt("%.2e", oracle.qp_max_xi_diff));
  }));
  lines.back().secs = shared_oracle_secs;
  lines.push_back(run_gate(2, "transport matches permutation brute force", [&] {
    const bool ok =
        oracle.w2_count == 1000 && oracle.w2_max_diff <= 1e-9 && shared_oracle_secs < 10.0;
    return std::make_pair(ok, "1000 pairs, max gap " + fmt("%.2e", oracle.w2_max_diff));
  }));
  lines.back().secs = shared_oracle_secs;

  // 3. Gradients of convex quadratics always satisfy the revealed
  // constraints, and the solved direction is never longer.
  lines.push_back(run_gate(3, "convex gradients are admissible and dominate the solve", [&] {
    RngStream rng = RngStream::substream(kGateSeed, 0xc3, 0);
    int ok = 0;
    double worst = 0.0;
    for (int k = 0; k < 500; ++k) {
      const int d = 1 + static_cast<int>(rng.next_u64() % 3);
      const std::size_t n = 1 + rng.next_u64() % 6;
      const Point center = random_point(rng, d, 1.0);
      const Point x = random_point(rng, d, 1.0);
      GridSet grid;
      for (std::size_t i = 0; i < n; ++i) grid.points.push_back(random_point(rng, d, 1.0));
      std::vector<double> vz;
      for (const auto& z : grid.points) vz.push_back(dist_sq(z, center));
      const ConstraintSet cs = build_potential_constraints(x, grid, dist_sq(x, center), vz);
      const Vec grad = scaled(sub(x, center), 2.0);
      bool good = true;
      for (std::size_t i = 0; i < cs.size(); ++i) {
        const double margin = dot(grad, cs.directions[i]) - cs.offsets[i];
        worst = std::min(worst, margin);
        if (margin < -1e-9) good = false;
      }
      const SelectionOutcome sol = min_norm_select(cs);
      if (!sol.feasible() || norm(sol.xi) > norm(grad) + 1e-9) good = false;
      if (good) ++ok;
    }
    return std::make_pair(ok == 500, std::to_string(ok) + "/500 instances, worst margin " +
                                         fmt("%.2e", worst));
  }));

  // 4. Telescoped potential bound at every prefix: the tracking preset plus
  // one hundred random convex runs, both reference measures.
  lines.push_back(run_gate(4, "telescoped bound holds on preset and random convex runs", [&] {
    const RunConfig cfg = preset("fig-convex");
    const RunRecord rec = run_single(cfg, cfg.seed);
    std::string why;
    if (!all_rows_pass(rec.bound_checks, 2, "telescoped_potential", &why))
      return std::make_pair(false, "fig-convex: " + why);

    const auto& mq = std::get<MovingQuadratic>(cfg.scenario);
    const Point target = mq.target(cfg.rounds);
    double max_dist = 0.0;
    for (const Point& p : rec.trajectory.back())
      max_dist = std::max(max_dist, std::sqrt(dist_sq(p, target)));
    tracking_max_dist = max_dist;  // consumed by gate 10

    for (std::uint64_t r = 0; r < 100; ++r) {
      const RunConfig rnd = random_convex_config(0xc4, r);
      const RunRecord rr = run_single(rnd, rnd.seed);
      if (!all_rows_pass(rr.bound_checks, 2, "telescoped_potential", &why))
        return std::make_pair(false, "random run " + std::to_string(r) + ": " + why);
    }
    return std::make_pair(true, std::string("fig-convex and 100 random runs, both references"));
  }));
  if (lines.back().secs >= 60.0) {
    lines.back().pass = false;
    lines.back().detail += " (over the 60 s budget)";
  }

  // 5. Slack-relaxed bound on non-convex scenarios, every prefix.
  lines.push_back(run_gate(5, "slack-relaxed bound holds on non-convex runs", [&] {
    std::string why;
    RunConfig a = preset("fig-nonconvex");
    a.variant = Variant::Relaxed;
    a.check_uniform_reference = true;
    const RunRecord ra = run_single(a, a.seed);
    if (!all_rows_pass(ra.bound_checks, 2, "slack_relaxed", &why))
      return std::make_pair(false, "relaxed fig-nonconvex: " + why);

    RunConfig b = preset("wshape");
    b.variant = Variant::Relaxed;
    const RunRecord rb = run_single(b, b.seed);
    if (!all_rows_pass(rb.bound_checks, 2, "slack_relaxed", &why))
      return std::make_pair(false, "relaxed wshape: " + why);

    for (std::uint64_t r = 0; r < 40; ++r) {
      const RunConfig rnd = random_nonconvex_config(0xc5, r);
      const RunRecord rr = run_single(rnd, rnd.seed);
      if (!all_rows_pass(rr.bound_checks, 2, "slack_relaxed", &why))
        return std::make_pair(false, "random run " + std::to_string(r) + ": " + why);
    }
    return std::make_pair(true, std::string("two presets and 40 random non-convex runs"));
  }));

  // 6. Interaction-kernel bound on the clustering preset, every prefix.
  lines.push_back(run_gate(6, "interaction bound holds on the clustering preset", [&] {
    const RunConfig cfg = preset("interaction-quadratic");
    const RunRecord rec = run_single(cfg, cfg.seed);
    std::string why;
    if (!all_rows_pass(rec.bound_checks, 2, "interaction_kernel", &why))
      return std::make_pair(false, why);
    double min_slack = rec.bound_checks.front().min_slack;
    for (const auto& row : rec.bound_checks) min_slack = std::min(min_slack, row.min_slack);
    return std::make_pair(true, "both references, min slack " + fmt("%.2e", min_slack));
  }));

  // 7. The telescoped bound survives projection onto the unit ball while
  // the targets march out of it.
  lines.push_back(run_gate(7, "telescoped bound survives ball projection", [&] {
    RunConfig cfg = preset("fig-convex");
    cfg.name = "fig-convex-ball";
    cfg.domain = DomainSpec::ball({0.0, 0.0}, 1.0);
    cfg.rounds = 12;
    const auto& mq = std::get<MovingQuadratic>(cfg.scenario);
    if (norm(mq.target(cfg.rounds)) <= 1.0)
      return std::make_pair(false, std::string("targets never leave the disk"));
    const RunRecord rec = run_single(cfg, cfg.seed);
    std::string why;
    if (!all_rows_pass(rec.bound_checks, 2, "telescoped_potential_projected", &why))
      return std::make_pair(false, why);
    return std::make_pair(true,
                          "12 rounds, final target norm " + fmt("%.3f", norm(mq.target(12))));
  }));

  // 8. Expected exploration bound over replicate ensembles, and
  // 9. feasible-set growth with geometric infeasibility decay. The double
  // well replicates are streamed once and feed both gates.
  double stream_secs = 0.0;
  bool stream_sets_grow = true;
  std::vector<double> stream_frac_sums;
  long stream_reps = 0;
  int stream_m = 0;
  std::vector<MeanAcc> stream_gaps(2);  // per reference: best dirac, uniform
  {
    const auto t0 = std::chrono::steady_clock::now();
    const RunConfig wcfg = preset("wshape");
    const int R = 1000;
    stream_m = wcfg.m;
    stream_frac_sums.assign(static_cast<std::size_t>(wcfg.rounds), 0.0);
    for (int r = 0; r < R; ++r) {
      const std::uint64_t seed =
          r == 0 ? wcfg.seed
                 : RngStream::substream(wcfg.seed, 0xacce, static_cast<std::uint64_t>(r))
                       .next_u64();
      const RunRecord rec = run_single(wcfg, seed);
      std::size_t ref = 0;
      for (const auto& [name, led] : rec.ledgers) {
        (void)name;
        stream_gaps[ref % 2].add(bound_rhs_msoe(led, led.rounds) - led.regret_cum(led.rounds));
        ++ref;
      }
      const auto& infc = rec.primary_ledger().infeasible_count;
      for (std::size_t t = 0; t < infc.size(); ++t) {
        stream_frac_sums[t] += static_cast<double>(infc[t]) / wcfg.m;
        if (t + 1 < infc.size() && infc[t + 1] > infc[t]) stream_sets_grow = false;
      }
      ++stream_reps;
    }
    stream_secs = seconds_since(t0);
  }

  lines.push_back(run_gate(8, "expected exploration bound holds over ensembles", [&] {
    RunConfig cfg = preset("fig-nonconvex");
    cfg.replicates = 500;
    const EnsembleResult ens = run_ensemble(cfg);
    if (ens.checks.empty()) return std::make_pair(false, std::string("no ensemble rows"));
    for (const auto& row : ens.checks) {
      if (row.bound != "exploration_expected")
        return std::make_pair(false, "unexpected bound kind " + row.bound);
      if (!row.pass)
        return std::make_pair(false,
                              "ensemble mean " + fmt("%.4f", row.lhs) + " above " +
                                  fmt("%.4f", row.rhs) + " + " + fmt("%.2e", row.tol));
    }

    // Qualitative facts about the preset-seed replicate, consumed by gate 10.
    const RunRecord& rep0 = ens.records.front();
    const auto& infc = rep0.primary_ledger().infeasible_count;
    for (std::size_t t = 0; t < infc.size(); ++t)
      if (infc[t] > 0) {
        nonconvex_first_infeasible = static_cast<int>(t) + 1;
        break;
      }
    nonconvex_completed =
        rep0.trajectory.size() == static_cast<std::size_t>(cfg.rounds) + 1;
    nonconvex_inside_disk = true;
    for (const auto& pts : rep0.trajectory)
      for (const auto& p : pts)
        if (norm_sq(p) > 1.0 + 1e-9) nonconvex_inside_disk = false;

    // Double well side: mean gap between bound and regret stays nonnegative
    // within three standard errors, for both references.
    for (const MeanAcc& acc : stream_gaps) {
      if (acc.n < 500) return std::make_pair(false, std::string("too few replicates"));
      if (acc.mean() < -3.0 * acc.se())
        return std::make_pair(false, "double well mean gap " + fmt("%.4f", acc.mean()) +
                                         " below -3 se " + fmt("%.4f", 3.0 * acc.se()));
    }
    return std::make_pair(true, "500 replicate pairs plus " + std::to_string(stream_reps) +
                                    " double well replicates");
  }));
  lines.back().secs += stream_secs;
  if (lines.back().secs >= 300.0) {
    lines.back().pass = false;
    lines.back().detail += " (over the 5 min budget)";
  }

  lines.push_back(run_gate(9, "feasible sets grow and infeasibility decays geometrically", [&] {
    if (!stream_sets_grow)
      return std::make_pair(false, std::string("a feasible set lost a point"));
    const double gamma = gamma_lower_bound(1.0, 0.1);
    const double denom = static_cast<double>(stream_reps) * stream_m;
    const double initial = stream_frac_sums.front() / static_cast<double>(stream_reps);
    double worst_margin = 1e300;
    for (std::size_t t = 0; t < stream_frac_sums.size(); ++t) {
      const double p = stream_frac_sums[t] / static_cast<double>(stream_reps);
      const double se = std::sqrt(std::max(p * (1.0 - p), 0.0) / denom);
      const double cap = std::pow(1.0 - gamma, static_cast<double>(t)) * initial + 3.0 * se;
      worst_margin = std::min(worst_margin, cap - p);
      if (p > cap)
        return std::make_pair(false, "round " + std::to_string(t + 1) + ": fraction " +
                                         fmt("%.5f", p) + " above cap " + fmt("%.5f", cap));
    }
    return std::make_pair(true, std::to_string(stream_reps) +
                                    " replicates, worst decay margin " +
                                    fmt("%.2e", worst_margin));
  }));
  lines.back().secs += stream_secs;
  if (lines.back().secs >= 300.0) {
    lines.back().pass = false;
    lines.back().detail += " (over the 5 min budget)";
  }

  // 10. Qualitative endgames recorded from the reference runs.
  lines.push_back(run_gate(10, "preset endgames match their recorded shapes", [&] {
    if (!tracking_max_dist || !nonconvex_first_infeasible)
      return std::make_pair(false, std::string("upstream gate did not supply its run"));
    if (*tracking_max_dist >= kTrackingThreshold)
      return std::make_pair(false, "tracking distance " + fmt("%.4f", *tracking_max_dist) +
                                       " beyond the frozen ceiling");
    const int first = *nonconvex_first_infeasible;
    if (!(first > 3 && first <= 5))
      return std::make_pair(false,
                            "first exploration at round " + std::to_string(first));
    if (!nonconvex_completed)
      return std::make_pair(false, std::string("double bowl run ended early"));
    if (!nonconvex_inside_disk)
      return std::make_pair(false, std::string("a point escaped the unit disk"));
    return std::make_pair(true, "tracking gap " + fmt("%.4f", *tracking_max_dist) +
                                    ", first exploration at round " + std::to_string(first));
  }));

  // 11. Same-seed determinism of the CSV artifact for every preset.
  lines.push_back(run_gate(11, "same-seed preset runs emit byte-identical csv", [&] {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "olt_gate_csv";
    fs::remove_all(base);
    for (const std::string& name : preset_names()) {
      const RunConfig cfg = preset(name);
      const RunRecord a = run_single(cfg, cfg.seed);
      const RunRecord b = run_single(cfg, cfg.seed);
      write_outputs(a, (base / (name + "-a")).string());
      write_outputs(b, (base / (name + "-b")).string());
      const std::string bytes_a = slurp_bytes(base / (name + "-a") / "ledger.csv");
      const std::string bytes_b = slurp_bytes(base / (name + "-b") / "ledger.csv");
      if (bytes_a.empty() || bytes_a != bytes_b) {
        fs::remove_all(base);
        return std::make_pair(false, name + ": csv bytes differ");
      }
    }
    fs::remove_all(base);
    return std::make_pair(true, std::string("all four presets, two runs each"));
  }));

  bool all_pass = true;
  for (const GateLine& line : lines) {
    all_pass = all_pass && line.pass;
    std::printf("[%2d] %s  %7.1fs  %s: %s\n", line.id, line.pass ? "PASS" : "FAIL",
                line.secs, line.title.c_str(), line.detail.c_str());
  }
  std::printf("%s\n", all_pass ? "acceptance: all 11 gates passed"
                               : "acceptance: FAILURES present");
  return all_pass ? 0 : 1;
}

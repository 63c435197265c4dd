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

#include "olt/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "olt/oracles.hpp"
#include "olt/rng.hpp"
#include "olt/tolerances.hpp"

namespace olt {
namespace {

namespace fs = std::filesystem;

// Tolerance for every deterministic bound inequality.
constexpr double kBoundTol = 1e-8;

// Substream labels for the harness's own draws.
constexpr std::uint64_t kInitLabel = 0x1249ab53;
constexpr std::uint64_t kReplicateLabel = 0x52e9c07d;
constexpr std::uint64_t kOracleLabel = 0x06ac1e55;

[[noreturn]] void config_fail(const std::string& msg) { throw ConfigError(msg); }

}  // namespace

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* variant_name(Variant v) {
  switch (v) {
    case Variant::MinimalSelection:
      return "minimal_selection";
    case Variant::MSoE:
      return "msoe";
    case Variant::Relaxed:
      return "relaxed";
    case Variant::Interaction:
      return "interaction";
  }
  return "unknown";
}

const char* reference_name(ReferenceKind k) {
  switch (k) {
    case ReferenceKind::BestGridDirac:
      return "best_grid_dirac";
    case ReferenceKind::UniformGrid:
      return "uniform_grid";
    case ReferenceKind::UserSupplied:
      return "user";
  }
  return "unknown";
}

namespace {

Variant variant_from_name(const std::string& s) {
  if (s == "minimal_selection") return Variant::MinimalSelection;
  if (s == "msoe") return Variant::MSoE;
  if (s == "relaxed") return Variant::Relaxed;
  if (s == "interaction") return Variant::Interaction;
  config_fail("unknown variant: " + s);
}

ReferenceKind reference_from_name(const std::string& s) {
  if (s == "best_grid_dirac") return ReferenceKind::BestGridDirac;
  if (s == "uniform_grid") return ReferenceKind::UniformGrid;
  if (s == "user") return ReferenceKind::UserSupplied;
  config_fail("unknown reference policy: " + s);
}

std::vector<Point> points_from_json(const nlohmann::json& j) {
  std::vector<Point> pts;
  for (const auto& p : j) pts.push_back(p.get<Point>());
  return pts;
}

}  // namespace

GridSet GridSpec::build() const {
  GridSet grid;
  if (kind == Kind::Explicit) {
    grid.points = points;
  } else {
    if (axis_points < 2) config_fail("disk lattice needs at least two axis points");
    if (!(half_extent > 0.0) || !(radius > 0.0))
      config_fail("disk lattice needs positive extent and radius");
    const double pitch = 2.0 * half_extent / static_cast<double>(axis_points - 1);
    for (int iy = 0; iy < axis_points; ++iy)
      for (int ix = 0; ix < axis_points; ++ix) {
        const double x = -half_extent + pitch * static_cast<double>(ix);
        const double y = -half_extent + pitch * static_cast<double>(iy);
        if (x * x + y * y <= radius * radius + 1e-12) grid.points.push_back(Point{x, y});
      }
  }
  if (auto err = validate(grid)) config_fail("grid: " + *err);
  if (expect_count != 0 && grid.size() != expect_count)
    config_fail("grid has " + std::to_string(grid.size()) + " points, expected " +
                std::to_string(expect_count));
  return grid;
}

std::vector<Point> InitSpec::build(int m, std::uint64_t seed) const {
  if (m < 1) config_fail("m must be at least 1");
  std::vector<Point> pts;
  if (kind == Kind::Explicit) {
    if (points.size() != static_cast<std::size_t>(m))
      config_fail("explicit initial points must match m");
    return points;
  }
  if (kind == Kind::UniformBall) {
    if (center.empty() || !(radius > 0.0)) config_fail("bad initial ball");
    for (int j = 0; j < m; ++j) {
      RngStream rng = RngStream::substream(seed, kInitLabel, static_cast<std::uint64_t>(j));
      Point p(center.size());
      // Rejection from the bounding box; acceptance odds are fine for d <= 3.
      for (int tries = 0; tries < 4096; ++tries) {
        for (std::size_t k = 0; k < p.size(); ++k)
          p[k] = rng.uniform(center[k] - radius, center[k] + radius);
        if (dist_sq(p, center) <= radius * radius) break;
        if (tries == 4095) config_fail("ball sampling failed");
      }
      pts.push_back(p);
    }
    return pts;
  }
  if (lo.size() != hi.size() || lo.empty()) config_fail("bad initial box");
  for (std::size_t k = 0; k < lo.size(); ++k)
    if (!(lo[k] <= hi[k])) config_fail("bad initial box");
  for (int j = 0; j < m; ++j) {
    RngStream rng = RngStream::substream(seed, kInitLabel, static_cast<std::uint64_t>(j));
    Point p(lo.size());
    for (std::size_t k = 0; k < p.size(); ++k) p[k] = rng.uniform(lo[k], hi[k]);
    pts.push_back(p);
  }
  return pts;
}

namespace {

nlohmann::json scenario_to_json(const Scenario& sc) {
  if (const auto* mq = std::get_if<MovingQuadratic>(&sc))
    return {{"type", "moving_quadratic"}, {"start", mq->start}, {"drift", mq->drift}};
  if (const auto* mn = std::get_if<MinOfQuadratics>(&sc))
    return {{"type", "min_of_quadratics"},
            {"u_start", mn->u_start},
            {"u_drift", mn->u_drift},
            {"v_start", mn->v_start},
            {"v_drift", mn->v_drift}};
  if (const auto* ws = std::get_if<WShapePotential>(&sc)) {
    nlohmann::json j{{"type", "double_well"}, {"amplitude", ws->amplitude}, {"floor", ws->floor}};
    if (!ws->amplitudes.empty()) j["amplitudes"] = ws->amplitudes;
    return j;
  }
  const auto& in = std::get<InteractionScenario>(sc);
  nlohmann::json k;
  if (std::holds_alternative<QuadraticKernel>(in.kernel))
    k = "quadratic";
  else if (std::holds_alternative<ZeroKernel>(in.kernel))
    k = "zero";
  else
    k = {{"name", std::get<NamedKernel>(in.kernel).name}};
  return {{"type", "interaction"}, {"kernel", k}};
}

Scenario scenario_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "moving_quadratic") {
    MovingQuadratic mq;
    mq.start = j.at("start").get<Point>();
    mq.drift = j.at("drift").get<Point>();
    return mq;
  }
  if (type == "min_of_quadratics") {
    MinOfQuadratics mn;
    mn.u_start = j.at("u_start").get<Point>();
    mn.u_drift = j.at("u_drift").get<Point>();
    mn.v_start = j.at("v_start").get<Point>();
    mn.v_drift = j.at("v_drift").get<Point>();
    return mn;
  }
  if (type == "double_well") {
    WShapePotential ws;
    ws.amplitude = j.value("amplitude", 1.0);
    ws.floor = j.value("floor", 1.0);
    if (j.contains("amplitudes")) ws.amplitudes = j.at("amplitudes").get<std::vector<double>>();
    return ws;
  }
  if (type == "interaction") {
    InteractionScenario in;
    const auto& k = j.at("kernel");
    if (k.is_string()) {
      const std::string name = k.get<std::string>();
      if (name == "quadratic")
        in.kernel = QuadraticKernel{};
      else if (name == "zero")
        in.kernel = ZeroKernel{};
      else
        config_fail("unknown kernel: " + name);
    } else {
      in.kernel = NamedKernel{k.at("name").get<std::string>()};
    }
    return in;
  }
  config_fail("unknown scenario type: " + type);
}

nlohmann::json domain_to_json(const DomainSpec& d) {
  switch (d.kind) {
    case DomainSpec::Kind::WholeSpace:
      return {{"type", "whole_space"}};
    case DomainSpec::Kind::Ball:
      return {{"type", "ball"}, {"center", d.center}, {"radius", d.radius}};
    case DomainSpec::Kind::Box:
      return {{"type", "box"}, {"lo", d.lo}, {"hi", d.hi}};
  }
  config_fail("unknown domain kind");
}

DomainSpec domain_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "whole_space") return DomainSpec::whole_space();
  if (type == "ball")
    return DomainSpec::ball(j.at("center").get<Point>(), j.at("radius").get<double>());
  if (type == "box") return DomainSpec::box(j.at("lo").get<Vec>(), j.at("hi").get<Vec>());
  config_fail("unknown domain type: " + type);
}

nlohmann::json grid_to_json(const GridSpec& g) {
  if (g.kind == GridSpec::Kind::Explicit) return {{"type", "explicit"}, {"points", g.points}};
  return {{"type", "disk_lattice"},
          {"axis_points", g.axis_points},
          {"half_extent", g.half_extent},
          {"radius", g.radius},
          {"expect_count", g.expect_count}};
}

GridSpec grid_from_json(const nlohmann::json& j) {
  GridSpec g;
  const std::string type = j.at("type").get<std::string>();
  if (type == "explicit") {
    g.kind = GridSpec::Kind::Explicit;
    g.points = points_from_json(j.at("points"));
    return g;
  }
  if (type == "disk_lattice") {
    g.kind = GridSpec::Kind::DiskLattice;
    g.axis_points = j.at("axis_points").get<int>();
    g.half_extent = j.value("half_extent", 1.0);
    g.radius = j.value("radius", 1.0);
    g.expect_count = j.value("expect_count", std::size_t{0});
    return g;
  }
  config_fail("unknown grid type: " + type);
}

nlohmann::json init_to_json(const InitSpec& s) {
  switch (s.kind) {
    case InitSpec::Kind::Explicit:
      return {{"type", "explicit"}, {"points", s.points}};
    case InitSpec::Kind::UniformBall:
      return {{"type", "uniform_ball"}, {"center", s.center}, {"radius", s.radius}};
    case InitSpec::Kind::UniformBox:
      return {{"type", "uniform_box"}, {"lo", s.lo}, {"hi", s.hi}};
  }
  config_fail("unknown init kind");
}

InitSpec init_from_json(const nlohmann::json& j) {
  InitSpec s;
  const std::string type = j.at("type").get<std::string>();
  if (type == "explicit") {
    s.kind = InitSpec::Kind::Explicit;
    s.points = points_from_json(j.at("points"));
    return s;
  }
  if (type == "uniform_ball") {
    s.kind = InitSpec::Kind::UniformBall;
    s.center = j.at("center").get<Point>();
    s.radius = j.at("radius").get<double>();
    return s;
  }
  if (type == "uniform_box") {
    s.kind = InitSpec::Kind::UniformBox;
    s.lo = j.at("lo").get<Vec>();
    s.hi = j.at("hi").get<Vec>();
    return s;
  }
  config_fail("unknown init type: " + type);
}

}  // namespace

RunConfig RunConfig::from_json(const nlohmann::json& j) {
  try {
    RunConfig c;
    c.schema_version = j.at("schema_version").get<int>();
    if (c.schema_version != 1) config_fail("unsupported schema_version");
    c.name = j.value("name", std::string{});
    c.scenario = scenario_from_json(j.at("scenario"));
    c.grid = grid_from_json(j.at("grid"));
    c.m = j.at("m").get<int>();
    c.init = init_from_json(j.at("init"));
    c.variant = variant_from_name(j.at("variant").get<std::string>());
    c.eta = j.at("eta").get<double>();
    c.rounds = j.at("rounds").get<int>();
    c.seed = j.at("seed").get<std::uint64_t>();
    c.domain = domain_from_json(j.at("domain"));
    if (j.contains("reference")) {
      const auto& r = j.at("reference");
      c.reference.kind = reference_from_name(r.at("policy").get<std::string>());
      if (c.reference.kind == ReferenceKind::UserSupplied)
        c.reference.user_weights = r.at("weights").get<std::vector<double>>();
    }
    c.check_uniform_reference = j.value("check_uniform_reference", true);
    c.replicates = j.value("replicates", 1);
    c.out_dir = j.value("out_dir", std::string{});
    return c;
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    config_fail(std::string("config parse error: ") + e.what());
  }
}

nlohmann::json RunConfig::to_json() const {
  nlohmann::json j{{"schema_version", schema_version},
                   {"name", name},
                   {"scenario", scenario_to_json(scenario)},
                   {"grid", grid_to_json(grid)},
                   {"m", m},
                   {"init", init_to_json(init)},
                   {"variant", variant_name(variant)},
                   {"eta", eta},
                   {"rounds", rounds},
                   {"seed", seed},
                   {"domain", domain_to_json(domain)},
                   {"check_uniform_reference", check_uniform_reference},
                   {"replicates", replicates},
                   {"out_dir", out_dir}};
  nlohmann::json r{{"policy", reference_name(reference.kind)}};
  if (reference.kind == ReferenceKind::UserSupplied) r["weights"] = reference.user_weights;
  j["reference"] = r;
  return j;
}

namespace {

void validate_config(const RunConfig& c) {
  if (c.rounds < 1) config_fail("rounds must be at least 1");
  if (c.m < 1) config_fail("m must be at least 1");
  if (!(c.eta > 0.0) || !std::isfinite(c.eta)) config_fail("eta must be positive");
  if (c.replicates < 1) config_fail("replicates must be at least 1");
  const bool scenario_interaction = is_interaction(c.scenario);
  const bool variant_interaction = c.variant == Variant::Interaction;
  if (scenario_interaction != variant_interaction)
    config_fail("interaction scenarios pair with the interaction variant only");
}

double bound_prefix(const RegretLedger& led, int t) {
  switch (led.variant) {
    case Variant::MinimalSelection:
      return bound_rhs_convex(led, t);
    case Variant::MSoE:
      return bound_rhs_msoe(led, t);
    case Variant::Relaxed:
      return bound_rhs_relaxed(led, t);
    case Variant::Interaction:
      return bound_rhs_interaction(led, t);
  }
  throw std::logic_error("unknown variant");
}

const char* bound_name(Variant v, bool projected) {
  switch (v) {
    case Variant::MinimalSelection:
      return projected ? "telescoped_potential_projected" : "telescoped_potential";
    case Variant::MSoE:
      return "exploration_expected";
    case Variant::Relaxed:
      return "slack_relaxed";
    case Variant::Interaction:
      return "interaction_kernel";
  }
  return "unknown";
}

}  // namespace

const RegretLedger& RunRecord::primary_ledger() const {
  return ledgers.at(reference_name(config.reference.kind));
}

RunRecord run_single(const RunConfig& config, std::uint64_t seed) {
  validate_config(config);
  const auto t0 = std::chrono::steady_clock::now();

  GridSet grid = config.grid.build();
  const int dim = grid.dimension();
  if (auto err = validate(config.scenario, dim)) config_fail("scenario: " + *err);
  if (config.domain.kind == DomainSpec::Kind::Ball &&
      config.domain.center.size() != static_cast<std::size_t>(dim))
    config_fail("domain dimension mismatch");
  if (config.domain.kind == DomainSpec::Kind::Box &&
      config.domain.lo.size() != static_cast<std::size_t>(dim))
    config_fail("domain dimension mismatch");
  if (config.reference.kind == ReferenceKind::UserSupplied &&
      config.reference.user_weights.size() != grid.size())
    config_fail("user reference weights must match the grid size");

  RunRecord rec;
  rec.config = config;
  rec.seed = seed;
  rec.version = kVersion;

  PlayerState state;
  state.points = config.init.build(config.m, seed);
  state.round = 1;
  for (Point& p : state.points) {
    if (p.size() != static_cast<std::size_t>(dim)) config_fail("initial point dimension mismatch");
    p = project(p, config.domain);
  }
  rec.trajectory.push_back(state.points);

  AlgorithmConfig acfg;
  acfg.eta = config.eta;
  acfg.variant = config.variant;
  acfg.domain = config.domain;

  std::vector<double> losses;
  std::vector<std::vector<double>> grid_vals;  // per-round potential values on the grid
  std::vector<std::vector<double>> zz;         // interaction kernel table (round-invariant)

  for (int t = 1; t <= config.rounds; ++t) {
    const OracleView view = reveal(config.scenario, t, state.points, grid);
    losses.push_back(player_loss(view));
    if (view.interaction) {
      if (zz.empty()) zz = view.kernels.zz;
    } else {
      grid_vals.push_back(view.values_at_grid);
    }

    std::pair<PlayerState, StepReport> step = [&] {
      switch (config.variant) {
        case Variant::MinimalSelection:
          return minimal_selection_round(state, view, grid, acfg);
        case Variant::MSoE:
          return msoe_round(state, view, grid, acfg, seed);
        case Variant::Relaxed:
          return relaxed_round(state, view, grid, acfg);
        case Variant::Interaction:
          return interaction_round(state, view, grid, acfg);
      }
      throw std::logic_error("unknown variant");
    }();
    state = std::move(step.first);
    rec.reports.push_back(std::move(step.second));
    rec.trajectory.push_back(state.points);
  }

  // Reference measures. For interaction runs the per-round "grid value" of a
  // candidate Dirac is the kernel's diagonal entry.
  std::vector<std::vector<double>> ref_rows;
  if (is_interaction(config.scenario)) {
    std::vector<double> diag(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) diag[i] = zz[i][i];
    ref_rows.assign(static_cast<std::size_t>(config.rounds), diag);
  } else {
    ref_rows = grid_vals;
  }

  std::vector<ReferenceMeasure> refs;
  switch (config.reference.kind) {
    case ReferenceKind::BestGridDirac:
      refs.push_back(best_grid_reference(ref_rows));
      break;
    case ReferenceKind::UniformGrid:
      refs.push_back(uniform_grid_reference(grid.size()));
      break;
    case ReferenceKind::UserSupplied:
      refs.push_back(user_reference(config.reference.user_weights));
      break;
  }
  if (config.check_uniform_reference && config.reference.kind != ReferenceKind::UniformGrid)
    refs.push_back(uniform_grid_reference(grid.size()));

  for (const ReferenceMeasure& ref : refs) {
    RegretLedger led;
    led.variant = config.variant;
    led.ref_kind = ref.kind;
    led.eta = config.eta;
    led.rounds = config.rounds;
    led.m = config.m;
    led.loss = losses;
    led.ref_loss.reserve(static_cast<std::size_t>(config.rounds));
    for (int t = 0; t < config.rounds; ++t) {
      double s = 0.0;
      if (is_interaction(config.scenario)) {
        for (std::size_t a = 0; a < ref.support.size(); ++a)
          for (std::size_t b = 0; b < ref.support.size(); ++b)
            s += ref.weights[a] * ref.weights[b] * zz[ref.support[a]][ref.support[b]];
      } else {
        for (std::size_t a = 0; a < ref.support.size(); ++a)
          s += ref.weights[a] * grid_vals[static_cast<std::size_t>(t)][ref.support[a]];
      }
      led.ref_loss.push_back(s);
    }
    const DiscreteMeasure nu = ref.measure(grid);
    led.full_w2 = true;
    led.w2sq.reserve(rec.trajectory.size());
    for (const auto& pts : rec.trajectory)
      led.w2sq.push_back(w2_squared(DiscreteMeasure::uniform(pts), nu));
    for (const StepReport& r : rec.reports) {
      led.sum_xi_sq_over_m.push_back(r.sum_xi_sq() / static_cast<double>(config.m));
      led.slack_sum.push_back(r.slack_sum());
      led.explore_sum.push_back(r.explore_penalty_sum(config.eta, dim));
      led.explore_scale_max.push_back(r.explore_scale_max());
      led.infeasible_count.push_back(static_cast<int>(r.infeasible_count()));
    }
    rec.ledgers[reference_name(ref.kind)] = std::move(led);
  }

  rec.bound_checks = verify_bounds(rec);
  rec.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

std::vector<BoundCheckRow> verify_bounds(const RunRecord& record) {
  std::vector<BoundCheckRow> rows;
  if (record.config.variant == Variant::MSoE) return rows;  // needs an ensemble
  const bool projected = record.config.domain.bounded();
  for (const auto& [name, led] : record.ledgers) {
    BoundCheckRow row;
    row.bound = bound_name(record.config.variant, projected);
    row.reference = name;
    row.horizon = led.rounds;
    row.tol = kBoundTol;
    row.pass = true;
    row.min_slack = std::numeric_limits<double>::infinity();
    for (int t = 1; t <= led.rounds; ++t) {
      const InequalityReport rep =
          check_inequality(led.regret_cum(t), bound_prefix(led, t), kBoundTol);
      row.min_slack = std::min(row.min_slack, rep.slack);
      if (!rep.pass) row.pass = false;
      if (t == led.rounds) {
        row.lhs = rep.lhs;
        row.rhs = rep.rhs;
      }
    }
    row.note = "checked all prefixes";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<BoundCheckRow> verify_bounds(const std::vector<RunRecord>& records) {
  if (records.empty()) config_fail("no records to verify");
  const Variant variant = records.front().config.variant;
  const int T = records.front().config.rounds;
  for (const RunRecord& r : records) {
    if (r.config.variant != variant) config_fail("records mix algorithm variants");
    if (r.config.rounds != T) config_fail("records mix horizons");
  }

  std::vector<BoundCheckRow> rows;
  if (variant != Variant::MSoE) {
    // Aggregate the per-record deterministic rows.
    std::map<std::string, BoundCheckRow> agg;
    for (const RunRecord& r : records)
      for (const BoundCheckRow& row : verify_bounds(r)) {
        auto it = agg.find(row.bound + "/" + row.reference);
        if (it == agg.end()) {
          agg.emplace(row.bound + "/" + row.reference, row);
        } else {
          BoundCheckRow& a = it->second;
          a.pass = a.pass && row.pass;
          a.min_slack = std::min(a.min_slack, row.min_slack);
          a.note = "checked all prefixes of all records";
        }
      }
    for (auto& [k, v] : agg) rows.push_back(std::move(v));
    return rows;
  }

  if (records.size() < 2) return rows;  // a sample-mean check needs replicates

  // Every reference ledger present in all records gets an expectation row.
  for (const auto& [name, first_led] : records.front().ledgers) {
    bool everywhere = true;
    for (const RunRecord& r : records)
      if (r.ledgers.find(name) == r.ledgers.end()) everywhere = false;
    if (!everywhere) continue;

    double mean_lhs = 0.0, mean_rhs = 0.0;
    std::vector<double> diffs;
    diffs.reserve(records.size());
    for (const RunRecord& r : records) {
      const RegretLedger& led = r.ledgers.at(name);
      const double lhs = led.regret_cum(T);
      const double rhs = bound_rhs_msoe(led, T);
      mean_lhs += lhs;
      mean_rhs += rhs;
      diffs.push_back(rhs - lhs);
    }
    const double R = static_cast<double>(records.size());
    mean_lhs /= R;
    mean_rhs /= R;
    double mean_diff = 0.0;
    for (double d : diffs) mean_diff += d;
    mean_diff /= R;
    double var = 0.0;
    for (double d : diffs) var += (d - mean_diff) * (d - mean_diff);
    var /= (R - 1.0);
    const double se = std::sqrt(var / R);

    BoundCheckRow row;
    row.bound = bound_name(variant, false);
    row.reference = name;
    row.horizon = T;
    row.lhs = mean_lhs;
    row.rhs = mean_rhs;
    row.tol = 3.0 * se;
    row.min_slack = mean_rhs + row.tol - mean_lhs;
    row.pass = mean_lhs <= mean_rhs + row.tol;
    row.note = "sample mean over " + std::to_string(records.size()) +
               " replicates, tolerance 3 standard errors";
    rows.push_back(std::move(row));
  }
  return rows;
}

namespace {

nlohmann::json ledger_to_json(const RegretLedger& led) {
  return nlohmann::json{{"reference", reference_name(led.ref_kind)},
                        {"full_w2", led.full_w2},
                        {"loss", led.loss},
                        {"ref_loss", led.ref_loss},
                        {"w2sq", led.w2sq},
                        {"sum_xi_sq_over_m", led.sum_xi_sq_over_m},
                        {"slack_sum", led.slack_sum},
                        {"explore_sum", led.explore_sum},
                        {"explore_scale_max", led.explore_scale_max},
                        {"infeasible_count", led.infeasible_count}};
}

RegretLedger ledger_from_json(const nlohmann::json& j, const RunConfig& cfg) {
  RegretLedger led;
  led.variant = cfg.variant;
  led.eta = cfg.eta;
  led.rounds = cfg.rounds;
  led.m = cfg.m;
  led.ref_kind = reference_from_name(j.at("reference").get<std::string>());
  led.full_w2 = j.at("full_w2").get<bool>();
  led.loss = j.at("loss").get<std::vector<double>>();
  led.ref_loss = j.at("ref_loss").get<std::vector<double>>();
  led.w2sq = j.at("w2sq").get<std::vector<double>>();
  led.sum_xi_sq_over_m = j.at("sum_xi_sq_over_m").get<std::vector<double>>();
  led.slack_sum = j.at("slack_sum").get<std::vector<double>>();
  led.explore_sum = j.at("explore_sum").get<std::vector<double>>();
  led.explore_scale_max = j.at("explore_scale_max").get<std::vector<double>>();
  led.infeasible_count = j.at("infeasible_count").get<std::vector<int>>();
  return led;
}

nlohmann::json bound_row_to_json(const BoundCheckRow& r) {
  return nlohmann::json{{"bound", r.bound},   {"reference", r.reference},
                        {"horizon", r.horizon}, {"lhs", r.lhs},
                        {"rhs", r.rhs},       {"tol", r.tol},
                        {"min_slack", r.min_slack}, {"pass", r.pass},
                        {"note", r.note}};
}

BoundCheckRow bound_row_from_json(const nlohmann::json& j) {
  BoundCheckRow r;
  r.bound = j.at("bound").get<std::string>();
  r.reference = j.at("reference").get<std::string>();
  r.horizon = j.at("horizon").get<int>();
  r.lhs = j.at("lhs").get<double>();
  r.rhs = j.at("rhs").get<double>();
  r.tol = j.at("tol").get<double>();
  r.min_slack = j.at("min_slack").get<double>();
  r.pass = j.at("pass").get<bool>();
  r.note = j.at("note").get<std::string>();
  return r;
}

}  // namespace

nlohmann::json RunRecord::to_json() const {
  nlohmann::json rounds = nlohmann::json::array();
  for (const StepReport& r : reports) {
    rounds.push_back({{"t", r.round},
                      {"feasible_count", r.feasible_set.size()},
                      {"infeasible_count", r.infeasible_count()},
                      {"sum_xi_sq", r.sum_xi_sq()},
                      {"slack_sum", r.slack_sum()},
                      {"explore_scale_max", r.explore_scale_max()}});
  }
  nlohmann::json ledgers_json;
  for (const auto& [name, led] : ledgers) ledgers_json[name] = ledger_to_json(led);
  nlohmann::json checks = nlohmann::json::array();
  for (const BoundCheckRow& r : bound_checks) checks.push_back(bound_row_to_json(r));
  return nlohmann::json{{"schema_version", 1},
                        {"version", version},
                        {"config", config.to_json()},
                        {"seed", seed},
                        {"wall_seconds", wall_seconds},
                        {"rounds", rounds},
                        {"ledgers", ledgers_json},
                        {"bound_checks", checks}};
}

namespace {

RunRecord record_from_json(const nlohmann::json& j) {
  RunRecord rec;
  rec.config = RunConfig::from_json(j.at("config"));
  rec.seed = j.at("seed").get<std::uint64_t>();
  rec.version = j.at("version").get<std::string>();
  rec.wall_seconds = j.at("wall_seconds").get<double>();
  for (const auto& [name, lj] : j.at("ledgers").items())
    rec.ledgers[name] = ledger_from_json(lj, rec.config);
  for (const auto& rj : j.at("bound_checks")) rec.bound_checks.push_back(bound_row_from_json(rj));
  return rec;
}

std::string make_csv(const RunRecord& rec) {
  const RegretLedger& led = rec.primary_ledger();
  std::string csv =
      "t,loss,ref_loss,regret_cum,w2sq_to_ref,sum_xi_sq_over_m,slack_sum,"
      "infeasible_count,explore_scale_max,bound_rhs_cum\n";
  double regret = 0.0;
  for (int t = 1; t <= led.rounds; ++t) {
    const std::size_t k = static_cast<std::size_t>(t - 1);
    regret += led.loss[k] - led.ref_loss[k];
    csv += std::to_string(t);
    csv += ',';
    csv += format_double(led.loss[k]);
    csv += ',';
    csv += format_double(led.ref_loss[k]);
    csv += ',';
    csv += format_double(regret);
    csv += ',';
    // Distance of the measure the player committed at round t.
    csv += format_double(led.w2sq_after(t - 1));
    csv += ',';
    csv += format_double(led.sum_xi_sq_over_m[k]);
    csv += ',';
    csv += format_double(led.slack_sum[k]);
    csv += ',';
    csv += std::to_string(led.infeasible_count[k]);
    csv += ',';
    csv += format_double(led.explore_scale_max[k]);
    csv += ',';
    csv += format_double(bound_prefix(led, t));
    csv += '\n';
  }
  return csv;
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
}

}  // namespace

void write_outputs(const RunRecord& record, const std::string& dir) {
  fs::create_directories(dir);
  write_file(fs::path(dir) / "record.json", record.to_json().dump(1) + "\n");
  write_file(fs::path(dir) / "ledger.csv", make_csv(record));
  nlohmann::json snap{{"name", record.config.name},
                      {"seed", record.seed},
                      {"rounds", record.config.rounds},
                      {"points_per_round", record.trajectory}};
  write_file(fs::path(dir) / "snapshots.json", snap.dump(1) + "\n");
}

std::vector<RunRecord> load_records(const std::string& dir) {
  std::vector<fs::path> files;
  const fs::path root(dir);
  if (!fs::exists(root)) config_fail("records directory does not exist: " + dir);
  if (fs::exists(root / "record.json")) files.push_back(root / "record.json");
  for (const auto& entry : fs::directory_iterator(root))
    if (entry.is_directory() && fs::exists(entry.path() / "record.json"))
      files.push_back(entry.path() / "record.json");
  std::sort(files.begin(), files.end());
  if (files.empty()) config_fail("no record.json found under " + dir);
  std::vector<RunRecord> records;
  for (const fs::path& f : files) {
    std::ifstream in(f);
    nlohmann::json j;
    in >> j;
    records.push_back(record_from_json(j));
  }
  return records;
}

EnsembleResult run_ensemble(const RunConfig& config) {
  validate_config(config);
  const int R = config.replicates;
  EnsembleResult result;
  result.records.resize(static_cast<std::size_t>(R));

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr first_error;
  std::mutex error_mutex;

  auto worker = [&] {
    while (true) {
      const int r = next.fetch_add(1);
      if (r >= R || failed.load()) return;
      try {
        const std::uint64_t seed =
            r == 0 ? config.seed
                   : RngStream::substream(config.seed, kReplicateLabel,
                                          static_cast<std::uint64_t>(r))
                         .next_u64();
        result.records[static_cast<std::size_t>(r)] = run_single(config, seed);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        failed.store(true);
        return;
      }
    }
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(hw, static_cast<unsigned>(R));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  result.checks = verify_bounds(result.records);
  return result;
}

std::vector<std::string> preset_names() {
  return {"fig-convex", "fig-nonconvex", "wshape", "interaction-quadratic"};
}

RunConfig preset(const std::string& name) {
  const double inv_sqrt2 = 0.70710678118654752;
  RunConfig c;
  c.name = name;
  if (name == "fig-convex") {
    MovingQuadratic mq;
    mq.start = {-inv_sqrt2, -inv_sqrt2};
    mq.drift = {0.15, 0.15};
    c.scenario = mq;
    c.grid.kind = GridSpec::Kind::DiskLattice;
    c.grid.axis_points = 33;
    c.grid.half_extent = 1.0;
    c.grid.radius = 1.0;
    c.grid.expect_count = 797;
    c.m = 10;
    c.init.kind = InitSpec::Kind::UniformBall;
    c.init.center = {0.0, 0.0};
    c.init.radius = 1.0;
    c.variant = Variant::MinimalSelection;
    c.eta = 0.2;
    c.rounds = 7;
    c.seed = 1;
    c.domain = DomainSpec::whole_space();
    return c;
  }
  if (name == "fig-nonconvex") {
    MinOfQuadratics mn;
    mn.u_start = {-inv_sqrt2, -inv_sqrt2};
    mn.v_start = {-inv_sqrt2, -inv_sqrt2};
    mn.u_drift = {0.165, 0.11};
    mn.v_drift = {0.11, 0.165};
    c.scenario = mn;
    c.grid.kind = GridSpec::Kind::DiskLattice;
    c.grid.axis_points = 33;
    c.grid.half_extent = 1.0;
    c.grid.radius = 1.0;
    c.grid.expect_count = 797;
    c.m = 10;
    c.init.kind = InitSpec::Kind::UniformBall;
    c.init.center = {0.0, 0.0};
    c.init.radius = 1.0;
    c.variant = Variant::MSoE;
    c.eta = 0.05;
    c.rounds = 19;
    c.seed = 1;
    c.domain = DomainSpec::ball({0.0, 0.0}, 1.0);
    c.check_uniform_reference = false;  // expectation bounds use the Dirac reference
    return c;
  }
  if (name == "wshape") {
    WShapePotential ws;
    ws.amplitude = 1.0;
    ws.floor = 1.0;
    c.scenario = ws;
    c.grid.kind = GridSpec::Kind::Explicit;
    c.grid.points = {{-1.0}, {1.0}};
    c.m = 200;
    c.init.kind = InitSpec::Kind::UniformBox;
    c.init.lo = {-1.0};
    c.init.hi = {1.0};
    c.variant = Variant::MSoE;
    c.eta = 0.1;
    c.rounds = 12;
    c.seed = 1;
    c.domain = DomainSpec::whole_space();
    return c;
  }
  if (name == "interaction-quadratic") {
    InteractionScenario in;
    in.kernel = QuadraticKernel{};
    c.scenario = in;
    c.grid.kind = GridSpec::Kind::Explicit;
    // Both grid atoms sit on one side of the starting cluster so every
    // per-point constraint cone stays pointed and the solves stay feasible.
    c.grid.points = {{0.0, 0.0}, {-0.25, -0.25}};
    c.m = 10;
    c.init.kind = InitSpec::Kind::UniformBox;
    c.init.lo = {0.3, 0.3};
    c.init.hi = {1.1, 1.1};
    c.variant = Variant::Interaction;
    c.eta = 0.02;
    c.rounds = 50;
    c.seed = 1;
    c.domain = DomainSpec::whole_space();
    return c;
  }
  config_fail("unknown preset: " + name);
}

OracleReport oracle_suite(std::uint64_t seed, int count) {
  if (count < 0) config_fail("oracle count must be nonnegative");
  OracleReport rep;
  std::uint64_t digest = 1469598103934665603ULL;
  auto absorb = [&digest](std::uint64_t x) {
    for (int b = 0; b < 8; ++b) {
      digest ^= (x >> (8 * b)) & 0xffULL;
      digest *= 1099511628211ULL;
    }
  };
  auto absorb_double = [&](double v) {
    std::uint64_t bits;
    static_assert(sizeof bits == sizeof v);
    std::memcpy(&bits, &v, sizeof bits);
    absorb(bits);
  };

  RngStream qp_rng = RngStream::substream(seed, kOracleLabel, 1);
  for (int k = 0; k < count; ++k) {
    const ConstraintSet c = oracles::random_constraints(qp_rng);
    const SelectionOutcome got = min_norm_select(c);
    const SelectionOutcome want = oracle_min_norm(c);
    ++rep.qp_count;
    bool agree = got.feasible() == want.feasible();
    absorb(got.feasible() ? 1 : 0);
    if (agree && got.feasible()) {
      const double diff = std::sqrt(dist_sq(got.xi, want.xi));
      rep.qp_max_xi_diff = std::max(rep.qp_max_xi_diff, diff);
      if (diff > 1e-6) agree = false;
      for (double v : got.xi) absorb_double(v);
    }
    if (agree) ++rep.qp_agree;
  }

  RngStream w2_rng = RngStream::substream(seed, kOracleLabel, 2);
  for (int k = 0; k < count; ++k) {
    const auto [mu, nu] = oracles::random_measure_pair(w2_rng);
    const double got = w2_squared(mu, nu);
    const double want = oracles::w2_squared_permutation(mu.points, nu.points);
    ++rep.w2_count;
    rep.w2_max_diff = std::max(rep.w2_max_diff, std::abs(got - want));
    absorb_double(got);
  }

  rep.pass = rep.qp_agree == rep.qp_count && rep.w2_max_diff <= 1e-9;
  rep.digest = digest;
  return rep;
}

}  // namespace olt

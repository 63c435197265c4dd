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

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include "CLI11.hpp"
#include "olt/harness.hpp"
#include "olt/tolerances.hpp"

namespace {

namespace fs = std::filesystem;

// --config accepts either a JSON file path or a built-in preset name.
olt::RunConfig load_config(const std::string& spec) {
  if (fs::exists(spec)) {
    std::ifstream in(spec);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw olt::ConfigError(std::string("cannot parse ") + spec + ": " + e.what());
    }
    return olt::RunConfig::from_json(j);
  }
  for (const std::string& name : olt::preset_names())
    if (name == spec) return olt::preset(spec);
  throw olt::ConfigError("config is neither a file nor a preset: " + spec);
}

std::string resolve_out_dir(const std::string& cli_out, const olt::RunConfig& cfg) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* root = std::getenv("OLT_OUT_DIR");
  const std::string base = root != nullptr && *root != '\0' ? root : "out";
  const std::string name = cfg.name.empty() ? "run" : cfg.name;
  return (fs::path(base) / name).string();
}

void print_rows(const std::vector<olt::BoundCheckRow>& rows) {
  if (rows.empty()) {
    std::printf("no applicable bound checks (expectation bounds need replicates >= 2)\n");
    return;
  }
  std::printf("%-34s %-16s %4s %14s %14s %12s %6s\n", "bound", "reference", "T", "lhs", "rhs",
              "min_slack", "pass");
  for (const auto& r : rows)
    std::printf("%-34s %-16s %4d %14.6g %14.6g %12.4g %6s\n", r.bound.c_str(),
                r.reference.c_str(), r.horizon, r.lhs, r.rhs, r.min_slack,
                r.pass ? "yes" : "NO");
}

bool all_pass(const std::vector<olt::BoundCheckRow>& rows) {
  for (const auto& r : rows)
    if (!r.pass) return false;
  return true;
}

int cmd_run(const std::string& config_spec, std::uint64_t seed, bool seed_given,
            const std::string& out) {
  olt::RunConfig cfg = load_config(config_spec);
  if (seed_given) cfg.seed = seed;
  const std::string dir = resolve_out_dir(out, cfg);

  if (cfg.replicates <= 1) {
    const olt::RunRecord rec = olt::run_single(cfg, cfg.seed);
    olt::write_outputs(rec, dir);
    std::printf("run %s: %d rounds, m=%d, wrote %s\n", cfg.name.c_str(), cfg.rounds, cfg.m,
                dir.c_str());
    print_rows(rec.bound_checks);
    return all_pass(rec.bound_checks) ? 0 : 1;
  }

  const olt::EnsembleResult ens = olt::run_ensemble(cfg);
  for (std::size_t r = 0; r < ens.records.size(); ++r) {
    char sub[32];
    std::snprintf(sub, sizeof sub, "rep_%04zu", r);
    olt::write_outputs(ens.records[r], (fs::path(dir) / sub).string());
  }
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& row : ens.checks)
    checks.push_back({{"bound", row.bound},
                      {"reference", row.reference},
                      {"horizon", row.horizon},
                      {"lhs", row.lhs},
                      {"rhs", row.rhs},
                      {"tol", row.tol},
                      {"min_slack", row.min_slack},
                      {"pass", row.pass},
                      {"note", row.note}});
  fs::create_directories(dir);
  std::ofstream(fs::path(dir) / "ensemble_checks.json") << checks.dump(1) << "\n";
  std::printf("ensemble %s: %d replicates, wrote %s\n", cfg.name.c_str(), cfg.replicates,
              dir.c_str());
  print_rows(ens.checks);
  return all_pass(ens.checks) ? 0 : 1;
}

int cmd_presets() {
  for (const std::string& name : olt::preset_names()) {
    const olt::RunConfig cfg = olt::preset(name);
    std::printf("%-24s variant=%-18s T=%-3d m=%-4d eta=%g\n", name.c_str(),
                olt::variant_name(cfg.variant), cfg.rounds, cfg.m, cfg.eta);
  }
  return 0;
}

int cmd_verify(const std::string& dir) {
  const std::vector<olt::RunRecord> records = olt::load_records(dir);
  std::printf("loaded %zu record(s) from %s\n", records.size(), dir.c_str());
  const std::vector<olt::BoundCheckRow> rows = records.size() == 1
                                                   ? olt::verify_bounds(records.front())
                                                   : olt::verify_bounds(records);
  print_rows(rows);
  return all_pass(rows) ? 0 : 1;
}

int cmd_oracle(std::uint64_t seed, int count) {
  const olt::OracleReport rep = olt::oracle_suite(seed, count);
  std::printf("qp: %d/%d agree, max xi diff %.3g\n", rep.qp_agree, rep.qp_count,
              rep.qp_max_xi_diff);
  std::printf("w2: %d pairs, max diff %.3g\n", rep.w2_count, rep.w2_max_diff);
  std::printf("digest: %016llx\n", static_cast<unsigned long long>(rep.digest));
  std::printf("%s\n", rep.pass ? "PASS" : "FAIL");
  return rep.pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"online learning harness for measure-valued decisions"};
  app.set_version_flag("--version", olt::kVersion);
  app.require_subcommand(1);

  std::string config_spec;
  std::string out_dir;
  std::uint64_t seed = 0;
  auto* run = app.add_subcommand("run", "run a config file or preset");
  run->add_option("--config", config_spec, "JSON config path or preset name")->required();
  auto* seed_opt = run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out_dir, "output directory");

  app.add_subcommand("presets", "list built-in presets");

  std::string records_dir;
  auto* verify = app.add_subcommand("verify", "re-check stored run records");
  verify->add_option("--records", records_dir, "directory with record.json files")->required();

  std::uint64_t oracle_seed = 7;
  int oracle_count = 1000;
  auto* oracle = app.add_subcommand("oracle", "cross-check solvers against brute force");
  oracle->add_option("--count", oracle_count, "instances per oracle family");
  oracle->add_option("--seed", oracle_seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(config_spec, seed, seed_opt->count() > 0, out_dir);
    if (app.get_subcommand("presets")->parsed()) return cmd_presets();
    if (verify->parsed()) return cmd_verify(records_dir);
    if (oracle->parsed()) return cmd_oracle(oracle_seed, oracle_count);
  } catch (const olt::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 2;
}

// Copyright 2026 The FactArena Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "factarena/cli.h"

#include <algorithm>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "factarena/arena.h"
#include "factarena/config.h"
#include "factarena/simharness.h"
#include "factarena/storage.h"
#include "factarena/templates.h"

namespace factarena::cli {

using json = nlohmann::json;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfigError:
      return kExitConfig;
    case ErrorCode::kProviderUnreachable:
    case ErrorCode::kAuthError:
    case ErrorCode::kBudgetExceeded:
      return kExitProvider;
    case ErrorCode::kIntegrityError:
    case ErrorCode::kCorruptLine:
    case ErrorCode::kSchemaViolation:
      return kExitIntegrity;
    default:
      return kExitFailure;
  }
}

namespace {

struct RunFlags {
  std::string config;
  std::string pool;
  std::optional<uint64_t> seed;
  std::optional<int> parallel;
  bool exclude_self_family = false;
  std::optional<double> k_factor;
  std::optional<double> lambda;
  std::optional<int> max_rounds;
  std::optional<int> sample_size;
  // ingest only
  std::string dataset;
  std::string format = "jsonl";
  int64_t limit = -1;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration (JSON)")->required();
  cmd->add_option("--pool", f.pool, "Record pool path (overrides the config)");
  cmd->add_option("--seed", f.seed, "Seed (overrides the config)");
  cmd->add_option("--parallel", f.parallel, "Worker threads");
  cmd->add_flag("--exclude-self-family", f.exclude_self_family,
                "Drop judges that share a family with either model");
  cmd->add_option("--k-factor", f.k_factor, "Elo K factor");
  cmd->add_option("--lambda", f.lambda, "Bradley-Terry prior strength");
  cmd->add_option("--max-rounds", f.max_rounds, "Evolution round cap");
  cmd->add_option("--sample-size", f.sample_size, "Models sampled per claim");
}

RunConfig BuildConfig(const RunFlags& f) {
  RunConfig cfg = LoadRunConfig(f.config);
  if (!f.pool.empty()) cfg.pool_path = f.pool;
  if (f.seed) cfg.seed = *f.seed;
  if (f.parallel) cfg.parallel = *f.parallel;
  if (f.exclude_self_family) cfg.exclude_self_family = true;
  if (f.k_factor) cfg.rating.k_factor = *f.k_factor;
  if (f.lambda) cfg.rating.prior_strength = *f.lambda;
  if (f.max_rounds) cfg.max_rounds = *f.max_rounds;
  if (f.sample_size) cfg.sample_size = *f.sample_size;
  if (!f.dataset.empty()) {
    DatasetConfig d;
    d.path = f.dataset;
    try {
      d.format = ParseDatasetFormat(f.format);
    } catch (const Error&) {
      throw Error(ErrorCode::kConfigError,
                  "'--format' must be hover, feverous or jsonl");
    }
    d.limit = f.limit;
    cfg.datasets = {d};
  }
  cfg.Validate();
  return cfg;
}

void PrintBoard(const Leaderboard& board, std::ostream& out) {
  out << LeaderboardTsv(board);
}

int RunCheck(const std::string& pool, bool lenient, std::ostream& out) {
  LoadedPool loaded = LoadAndCheck(pool, !lenient);
  const IntegrityReport& r = loaded.report;
  for (const auto& [kind, count] : r.counts) {
    out << kind << '\t' << count << '\n';
  }
  for (const std::string& d : r.dangling) out << "dangling\t" << d << '\n';
  for (const std::string& d : r.duplicates) out << "duplicate\t" << d << '\n';
  for (int64_t line : r.corrupt_lines) out << "corrupt\tline " << line << '\n';
  out << (r.clean() ? "clean" : "integrity errors found") << '\n';
  return r.clean() ? kExitOk : kExitIntegrity;
}

}  // namespace

DispatchResult Dispatch(const std::vector<std::string>& args, std::ostream& out,
                        std::ostream& err) {
  CLI::App app{"factarena: stage-wise arena evaluation of fact-checking models"};
  app.require_subcommand(1);

  RunFlags flags;
  std::vector<std::pair<std::string, CLI::App*>> phases;
  for (const char* name : {"ingest", "run", "guideline", "battle", "evolve",
                           "rate", "report", "all"}) {
    CLI::App* cmd = app.add_subcommand(name, std::string("Phase: ") + name);
    AddRunFlags(cmd, flags);
    phases.emplace_back(name, cmd);
  }
  CLI::App* ingest = phases.front().second;
  ingest->add_option("--dataset", flags.dataset, "Dataset file to ingest");
  ingest->add_option("--format", flags.format, "hover, feverous or jsonl");
  ingest->add_option("--limit", flags.limit, "Rows to sample (-1: all)");

  int sim_models = 8;
  double sim_spacing = 50.0;
  int sim_battles = 100;
  double sim_tie_rate = 0.1;
  uint64_t sim_seed = 0;
  double sim_lambda = RatingConfig{}.prior_strength;
  std::string sim_pool;
  CLI::App* sim = app.add_subcommand("sim", "Synthetic-skill tournament");
  sim->add_option("--models", sim_models, "Number of synthetic models");
  sim->add_option("--spacing", sim_spacing, "Skill spacing (Elo)");
  sim->add_option("--battles-per-pair", sim_battles, "Battles per pair");
  sim->add_option("--tie-rate", sim_tie_rate, "Probability of a tie");
  sim->add_option("--seed", sim_seed, "Seed")->required();
  sim->add_option("--lambda", sim_lambda, "Bradley-Terry prior strength");
  sim->add_option("--pool", sim_pool, "Write the simulated pool here");

  std::string check_pool;
  bool check_lenient = false;
  CLI::App* check = app.add_subcommand("check", "Check pool integrity");
  check->add_option("--pool", check_pool, "Pool file")->required();
  check->add_flag("--lenient", check_lenient, "Skip corrupt lines");

  std::string templates_out = "templates";
  CLI::App* templates = app.add_subcommand("templates", "Write default templates");
  templates->add_option("--out", templates_out, "Directory");

  DispatchResult result;
  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return result;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = kExitConfig;
    return result;
  }

  std::optional<Arena> arena;
  try {
    for (const auto& [name, cmd] : phases) {
      if (!cmd->parsed()) continue;
      arena.emplace(BuildConfig(flags));
      if (name == "ingest") {
        arena->Ingest();
        out << "claims in pool: "
            << arena->pool().Payloads(RecordKind::kClaim).size() << '\n';
      } else if (name == "run") {
        arena->Run();
      } else if (name == "guideline") {
        arena->Guideline();
      } else if (name == "battle") {
        arena->Judge();
      } else if (name == "evolve") {
        arena->Evolve();
      } else if (name == "rate") {
        PrintBoard(arena->Rate().leaderboard, out);
      } else if (name == "report") {
        arena->Report();
        out << "reports written to " << arena->config().reports_dir.string()
            << '\n';
      } else if (name == "all") {
        arena->RunAll();
        PrintBoard(arena->Rate(false).leaderboard, out);
      }
      result.provider_calls = arena->gateway().stats().outbound_calls;
      return result;
    }
    if (sim->parsed()) {
      SimConfig cfg;
      cfg.models = SpacedModels(sim_models, sim_spacing);
      cfg.battles_per_pair = sim_battles;
      cfg.tie_rate = sim_tie_rate;
      cfg.seed = sim_seed;
      SimResult sim_result = SimulateTournament(cfg);
      if (!sim_pool.empty()) {
        RecordPool pool(sim_pool);
        AppendSimulatedPool(pool, sim_result);
      }
      RatingConfig rating;
      rating.prior_strength = sim_lambda;
      RatingTable fitted = BtFit(sim_result.overall, rating);
      Recovery recovery = RecoveryScore(fitted, cfg);
      json report{{"spearman", recovery.spearman},
                  {"max_gap_error", recovery.max_gap_error},
                  {"battles", sim_result.outcomes.size()},
                  {"ratings", fitted.ratings}};
      out << report.dump(2) << '\n';
    } else if (check->parsed()) {
      result.exit_code = RunCheck(check_pool, check_lenient, out);
    } else if (templates->parsed()) {
      WriteDefaultTemplates(templates_out);
      out << "templates written to " << templates_out << '\n';
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = ExitCodeFor(e.code());
    if (arena) result.provider_calls = arena->gateway().stats().outbound_calls;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = kExitFailure;
  }
  return result;
}

}  // namespace factarena::cli

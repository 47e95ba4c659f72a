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

#include "factarena/arena.h"

#include <atomic>
#include <iostream>
#include <optional>
#include <thread>

#include "factarena/hash.h"
#include "factarena/metrics.h"
#include "factarena/text.h"

namespace factarena {

using json = nlohmann::json;

std::vector<std::exception_ptr> ParallelFor(
    size_t n, int workers, const std::function<void(size_t)>& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  size_t threads = std::min(n, static_cast<size_t>(std::max(1, workers)));
  if (threads <= 1) {
    work();
    return errors;
  }
  std::vector<std::thread> pool;
  for (size_t t = 0; t < threads; ++t) pool.emplace_back(work);
  for (std::thread& t : pool) t.join();
  return errors;
}

namespace {

void RethrowFirst(const std::vector<std::exception_ptr>& errors) {
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::string PlanKey(const std::string& claim, const std::string& a,
                    const std::string& b) {
  return claim + "\n" + a + "\n" + b;
}

std::string SnapshotKey(const RatingTable& t) {
  return std::string(RatingMethodName(t.method)) + "/" +
         std::string(DimensionName(t.dimension));
}

json SnapshotPayload(const RatingTable& table) {
  json payload = table;
  if (payload.contains("processing_order")) {
    payload.erase("processing_order");
    payload["processing_order_digest"] =
        Sha256Hex(text::Join(table.processing_order, "\n"));
  }
  return payload;
}

}  // namespace

std::shared_ptr<Gateway> MakeGateway(const RunConfig& cfg) {
  auto gateway = std::make_shared<Gateway>(cfg.gateway);
  std::shared_ptr<HttpTransport> transport;
  auto http = [&] {
    if (!transport) transport = MakeHttplibTransport();
    return transport;
  };
  for (const ProviderConfig& p : cfg.providers) {
    if (p.kind == "scripted") {
      gateway->AddProvider(
          p.id, std::make_shared<ScriptedProvider>(p.script, p.default_response));
    } else {
      gateway->AddProvider(p.id, MakeHttpChatProviderFromEnv(p.id, http()));
    }
  }
  if (cfg.search.kind == "scripted") {
    gateway->SetSearchBackend(std::make_shared<ScriptedSearch>(
        cfg.search.fixtures, cfg.search.default_results, cfg.search.available));
  } else if (cfg.search.kind == "http") {
    gateway->SetSearchBackend(MakeHttpSearchBackendFromEnv(http()));
  }
  if (cfg.wiki.kind == "scripted") {
    gateway->SetWikiBackend(
        std::make_shared<ScriptedWiki>(cfg.wiki.pages, cfg.wiki.available));
  } else if (cfg.wiki.kind == "http") {
    gateway->SetWikiBackend(
        std::make_shared<HttpWikiBackend>(cfg.wiki.base_url, http()));
  }
  return gateway;
}

Arena::Arena(RunConfig cfg) : Arena(cfg, MakeGateway(cfg)) {}

Arena::Arena(RunConfig cfg, std::shared_ptr<Gateway> gateway)
    : cfg_(std::move(cfg)), gateway_(std::move(gateway)) {
  cfg_.Validate();
  templates_ = LoadTemplates(cfg_.template_dir);
  pipeline_ = std::make_unique<FactCheckPipeline>(*gateway_, templates_,
                                                  cfg_.pipeline);
  CheckManifest();
  pool_ = std::make_unique<RecordPool>(cfg_.pool_path);
  LoadState();
}

void Arena::CheckManifest() {
  std::filesystem::path path = ManifestPath(cfg_.pool_path);
  std::optional<RunManifest> manifest = ReadManifest(path);
  if (manifest) {
    if (manifest->config_digest != cfg_.Digest()) {
      throw Error(ErrorCode::kConfigError,
                  "'config' does not match the manifest of pool " +
                      cfg_.pool_path.string() +
                      " (seed, models, judges or sampling changed)");
    }
    return;
  }
  RunManifest m;
  m.run_name = cfg_.run_name;
  m.seed = cfg_.seed;
  m.config = cfg_.raw;
  m.config_digest = cfg_.Digest();
  m.model_pool = ModelIds();
  WriteManifest(path, m);
}

void Arena::MarkPhase(const std::string& phase) {
  std::filesystem::path path = ManifestPath(cfg_.pool_path);
  RunManifest m = ReadManifest(path).value_or(RunManifest{});
  m.phases[phase] = true;
  WriteManifest(path, m);
}

void Arena::LoadState() {
  PoolView view = ParsePool(pool_->Snapshot());
  for (Claim& c : view.claims) {
    claim_order_.push_back(c.claim_id);
    claims_[c.claim_id] = std::move(c);
  }
  for (PipelineRun& r : view.runs) runs_[r.run_id] = std::move(r);
  for (ExtractionGuideline& g : view.extraction_guidelines) {
    extraction_[g.claim_id] = std::move(g);
  }
  for (EvidenceGuideline& g : view.evidence_guidelines) {
    evidence_[g.claim_id] = std::move(g);
  }
  for (const PlanEntry& e : view.plan_entries) {
    plan_entries_.insert(PlanKey(e.claim_id, e.model_a, e.model_b));
  }
  for (Battle& b : view.battles) battles_[b.battle_id] = std::move(b);
  for (JudgmentRecord& j : view.judgments) {
    judgments_[j.battle_id][j.judge_id] = std::move(j);
  }
  for (BattleOutcome& o : view.outcomes) {
    outcome_order_.push_back(o.battle_id);
    outcomes_[o.battle_id] = std::move(o);
  }
  for (EvolutionLineage& l : view.lineages) {
    lineages_[l.root_claim_id] = std::move(l);
  }
  std::vector<json> stored = pool_->Payloads(RecordKind::kRatingSnapshot);
  for (size_t i = 0; i < stored.size(); ++i) {
    latest_snapshot_[SnapshotKey(view.rating_snapshots[i])] = stored[i];
  }
}

std::vector<std::string> Arena::ModelIds() const {
  std::vector<std::string> ids;
  for (const ModelSpec& m : cfg_.models) ids.push_back(m.id);
  return ids;
}

std::vector<std::string> Arena::OriginalClaimIds() const {
  std::vector<std::string> ids;
  for (const std::string& id : claim_order_) {
    if (!claims_.at(id).lineage) ids.push_back(id);
  }
  return ids;
}

TournamentPlan Arena::Plan() const {
  std::vector<std::string> claims = OriginalClaimIds();
  std::vector<std::string> models = ModelIds();
  return BuildPlan(claims, models, cfg_.sample_size, cfg_.seed);
}

void Arena::AppendClaim(const Claim& claim) {
  if (claims_.count(claim.claim_id)) return;
  claim.Validate();
  pool_->Append(RecordKind::kClaim, json(claim));
  claims_[claim.claim_id] = claim;
  claim_order_.push_back(claim.claim_id);
}

void Arena::EnsurePlanEntries(const ClaimSchedule& schedule) {
  for (const auto& [a, b] : schedule.pairs) {
    std::string key = PlanKey(schedule.claim_id, a, b);
    if (plan_entries_.count(key)) continue;
    pool_->Append(RecordKind::kPlanEntry,
                  json{{"claim_id", schedule.claim_id},
                       {"model_a", a},
                       {"model_b", b},
                       {"models", schedule.models}});
    plan_entries_.insert(key);
  }
}

void Arena::Ingest() {
  std::filesystem::path manifest_path = ManifestPath(cfg_.pool_path);
  RunManifest manifest = ReadManifest(manifest_path).value_or(RunManifest{});
  for (const DatasetConfig& dataset : cfg_.datasets) {
    IngestResult result =
        IngestClaims(dataset.path, dataset.format, dataset.limit, cfg_.seed);
    for (const Claim& claim : result.claims) AppendClaim(claim);
    manifest.claim_source_digests[dataset.path.filename().string()] =
        Sha256Hex(ReadFile(dataset.path));
    if (result.unmappable > 0) {
      std::cerr << dataset.path.string() << ": skipped " << result.unmappable
                << " rows with unmappable labels\n";
    }
  }
  manifest.phases["ingest"] = true;
  WriteManifest(manifest_path, manifest);
}

void Arena::RunSchedules(const std::vector<ClaimSchedule>& schedules) {
  struct Task {
    const Claim* claim;
    const ModelSpec* model;
  };
  std::map<std::string, const ModelSpec*> specs;
  for (const ModelSpec& m : cfg_.models) specs[m.id] = &m;
  std::vector<Task> tasks;
  for (const ClaimSchedule& s : schedules) {
    const Claim& claim = claims_.at(s.claim_id);
    for (const std::string& model : s.models) {
      if (runs_.count(MakeRunId(model, s.claim_id))) continue;
      tasks.push_back({&claim, specs.at(model)});
    }
  }
  std::vector<std::optional<PipelineRun>> results(tasks.size());
  std::vector<std::exception_ptr> errors =
      ParallelFor(tasks.size(), cfg_.parallel, [&](size_t i) {
        results[i] = pipeline_->RunPipeline(*tasks[i].model, *tasks[i].claim);
      });
  for (std::optional<PipelineRun>& run : results) {
    if (!run) continue;
    pool_->Append(RecordKind::kRun, json(*run));
    runs_[run->run_id] = std::move(*run);
  }
  RethrowFirst(errors);
}

void Arena::Run() {
  TournamentPlan plan = Plan();
  for (const ClaimSchedule& s : plan.claims) EnsurePlanEntries(s);
  RunSchedules(plan.claims);
  MarkPhase("run");
}

void Arena::GuidelinesFor(const std::vector<ClaimSchedule>& schedules) {
  std::map<std::string, std::string> family;
  for (const ModelSpec& m : cfg_.models) family[m.id] = m.family;
  struct Work {
    const Claim* claim;
    std::vector<CandidateSet> candidates;
    bool need_extraction = false;
    bool need_evidence = false;
    std::optional<ExtractionGuideline> extraction;
    std::optional<EvidenceGuideline> evidence;
  };
  std::vector<Work> work;
  for (const ClaimSchedule& s : schedules) {
    Work w;
    w.claim = &claims_.at(s.claim_id);
    w.need_extraction = !extraction_.count(s.claim_id);
    w.need_evidence = !evidence_.count(s.claim_id);
    if (!w.need_extraction && !w.need_evidence) continue;
    for (const std::string& model : s.models) {
      auto run = runs_.find(MakeRunId(model, s.claim_id));
      if (run == runs_.end() || !run->second.valid) continue;
      w.candidates.push_back(
          {run->second.run_id, family.at(model), run->second.sub_claims});
    }
    // Without any valid run there is nothing to battle.
    if (w.candidates.empty()) continue;
    work.push_back(std::move(w));
  }
  std::vector<std::exception_ptr> errors =
      ParallelFor(work.size(), cfg_.parallel, [&](size_t i) {
        Work& w = work[i];
        if (w.need_extraction) {
          try {
            w.extraction = ConsolidateExtractionGuideline(
                *gateway_, templates_, *w.claim, w.candidates, cfg_.judges,
                cfg_.seed, cfg_.consolidation);
          } catch (const Error& e) {
            if (e.code() != ErrorCode::kEmptyPanel &&
                e.code() != ErrorCode::kParseError) {
              throw;
            }
          }
        }
        if (w.need_evidence) {
          w.evidence = BuildEvidenceGuideline(*gateway_, templates_, *w.claim,
                                              cfg_.judges.front());
        }
      });
  for (Work& w : work) {
    if (w.extraction) {
      json payload = *w.extraction;
      payload["type"] = "extraction";
      pool_->Append(RecordKind::kGuideline, payload);
      extraction_[w.claim->claim_id] = std::move(*w.extraction);
    }
    if (w.evidence) {
      json payload = *w.evidence;
      payload["type"] = "evidence";
      pool_->Append(RecordKind::kGuideline, payload);
      evidence_[w.claim->claim_id] = std::move(*w.evidence);
    }
  }
  RethrowFirst(errors);
}

void Arena::Guideline() {
  GuidelinesFor(Plan().claims);
  MarkPhase("guideline");
}

void Arena::BattlesFor(const std::vector<ClaimSchedule>& schedules) {
  std::map<std::string, std::string> family;
  for (const ModelSpec& m : cfg_.models) family[m.id] = m.family;
  struct Pending {
    AssembledBattle assembled;
    std::vector<ModelSpec> panel;
    bool new_battle = false;
  };
  struct JudgeTask {
    size_t battle;
    size_t judge;
  };
  std::vector<Pending> pending;
  std::vector<JudgeTask> tasks;
  for (const ClaimSchedule& s : schedules) {
    const Claim& claim = claims_.at(s.claim_id);
    for (const auto& [a, b] : s.pairs) {
      std::string battle_id = MakeBattleId(s.claim_id, a, b);
      if (outcomes_.count(battle_id)) continue;
      auto run_a = runs_.find(MakeRunId(a, s.claim_id));
      auto run_b = runs_.find(MakeRunId(b, s.claim_id));
      if (run_a == runs_.end() || run_b == runs_.end() ||
          !run_a->second.valid || !run_b->second.valid) {
        continue;
      }
      Battle probe;
      probe.battle_id = battle_id;
      probe.model_a = a;
      probe.model_b = b;
      Pending p;
      try {
        p.panel = SelfFamilyFilter(probe, cfg_.judges, family,
                                   cfg_.exclude_self_family);
        auto ex = extraction_.find(s.claim_id);
        auto ev = evidence_.find(s.claim_id);
        BattleGuidelines guidelines{
            ex == extraction_.end() ? nullptr : &ex->second,
            ev == evidence_.end() ? nullptr : &ev->second,
            &GetJustificationRubric()};
        p.assembled = AssembleBattle(templates_, claim, run_a->second,
                                     run_b->second, guidelines, p.panel,
                                     cfg_.seed, cfg_.missing_guideline);
      } catch (const Error& e) {
        if (e.code() == ErrorCode::kEmptyPanel ||
            e.code() == ErrorCode::kMissingGuideline) {
          continue;
        }
        throw;
      }
      p.new_battle = !battles_.count(battle_id);
      const auto& done = judgments_[battle_id];
      for (size_t j = 0; j < p.panel.size(); ++j) {
        if (!done.count(p.panel[j].id)) tasks.push_back({pending.size(), j});
      }
      pending.push_back(std::move(p));
    }
  }
  std::vector<std::optional<JudgmentRecord>> results(tasks.size());
  std::vector<std::exception_ptr> errors =
      ParallelFor(tasks.size(), cfg_.parallel, [&](size_t i) {
        const Pending& p = pending[tasks[i].battle];
        const ModelSpec& judge = p.panel[tasks[i].judge];
        results[i] = JudgeBattle(*gateway_, p.assembled.battle, judge,
                                 p.assembled.prompts[tasks[i].judge].text,
                                 cfg_.pipeline.max_reprompts);
      });
  std::map<size_t, std::vector<JudgmentRecord>> fresh;
  bool incomplete = false;
  std::set<size_t> failed_battles;
  for (size_t i = 0; i < tasks.size(); ++i) {
    if (results[i]) {
      fresh[tasks[i].battle].push_back(*results[i]);
    } else {
      failed_battles.insert(tasks[i].battle);
      incomplete = true;
    }
  }
  for (size_t b = 0; b < pending.size(); ++b) {
    const Battle& battle = pending[b].assembled.battle;
    if (pending[b].new_battle) {
      pool_->Append(RecordKind::kBattle, json(battle));
      battles_[battle.battle_id] = battle;
    }
    for (const JudgmentRecord& r : fresh[b]) {
      pool_->Append(RecordKind::kJudgment, json(r));
      judgments_[battle.battle_id][r.judge_id] = r;
    }
    if (failed_battles.count(b)) continue;
    std::vector<JudgmentRecord> records;
    for (const ModelSpec& judge : pending[b].panel) {
      auto& done = judgments_[battle.battle_id];
      auto it = done.find(judge.id);
      if (it != done.end()) records.push_back(it->second);
    }
    try {
      BattleOutcome outcome = MajorityVote(battle, records, cfg_.quorum);
      pool_->Append(RecordKind::kOutcome, json(outcome));
      outcome_order_.push_back(outcome.battle_id);
      outcomes_[outcome.battle_id] = std::move(outcome);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoValidJudgments) throw;
    }
  }
  if (incomplete) RethrowFirst(errors);
}

void Arena::Judge() {
  BattlesFor(Plan().claims);
  MarkPhase("battle");
}

Correctness Arena::CorrectnessFor(const std::string& claim_id,
                                  const std::vector<std::string>& models) const {
  Correctness correctness;
  for (const std::string& model : models) {
    auto run = runs_.find(MakeRunId(model, claim_id));
    if (run != runs_.end() && run->second.valid) {
      correctness[model] = run->second.correct;
    }
  }
  return correctness;
}

WeaknessAnalysis Arena::AnalysisFor(const std::string& claim_id) const {
  std::vector<PipelineRun> runs;
  for (const auto& [id, run] : runs_) {
    if (run.claim_id == claim_id) runs.push_back(run);
  }
  std::vector<Battle> battles;
  std::vector<JudgmentRecord> judgments;
  for (const auto& [id, battle] : battles_) {
    if (battle.claim_id != claim_id) continue;
    battles.push_back(battle);
    auto it = judgments_.find(id);
    if (it == judgments_.end()) continue;
    for (const auto& [judge, record] : it->second) judgments.push_back(record);
  }
  return BuildWeaknessAnalysis(claim_id, runs, battles, judgments);
}

void Arena::Evolve() {
  if (!cfg_.evolver) {
    throw Error(ErrorCode::kConfigError, "'evolver' must be set to evolve claims");
  }
  EvolutionOptions options;
  options.evolver = *cfg_.evolver;
  options.max_rounds = cfg_.max_rounds;
  options.max_reprompts = cfg_.pipeline.max_reprompts;
  EvolutionHooks hooks;
  hooks.process = [this](const Claim& claim,
                         const std::vector<std::string>& models) {
    AppendClaim(claim);
    ClaimSchedule schedule = ScheduleWithModels(claim.claim_id, models);
    EnsurePlanEntries(schedule);
    RunSchedules({schedule});
    GuidelinesFor({schedule});
    BattlesFor({schedule});
    return CorrectnessFor(claim.claim_id, models);
  };
  hooks.analyze = [this](const Claim& claim) {
    return AnalysisFor(claim.claim_id);
  };
  for (const ClaimSchedule& s : Plan().claims) {
    if (lineages_.count(s.claim_id)) continue;
    EvolutionLineage lineage = EvolveLineage(
        *gateway_, templates_, claims_.at(s.claim_id),
        CorrectnessFor(s.claim_id, s.models), s.models, hooks, options);
    pool_->Append(RecordKind::kLineage, json(lineage));
    lineages_[lineage.root_claim_id] = std::move(lineage);
  }
  MarkPhase("evolve");
}

std::vector<BattleOutcome> Arena::RatingInputs() const {
  std::vector<BattleOutcome> inputs;
  for (const std::string& id : outcome_order_) {
    const BattleOutcome& o = outcomes_.at(id);
    if (!o.quorum_met) continue;
    if (!cfg_.per_judge_votes) {
      inputs.push_back(o);
      continue;
    }
    auto it = judgments_.find(id);
    if (it == judgments_.end()) continue;
    for (const auto& [judge, record] : it->second) {
      if (!record.valid) continue;
      BattleOutcome vote = o;
      vote.battle_id = id + "#" + judge;
      vote.outcomes = record.vote.outcomes;
      inputs.push_back(vote);
    }
  }
  return inputs;
}

RateResult Arena::Rate(bool append_snapshots) {
  std::vector<BattleOutcome> inputs = RatingInputs();
  std::set<std::string> seen;
  for (const BattleOutcome& o : inputs) {
    seen.insert(o.model_a);
    seen.insert(o.model_b);
  }
  std::vector<std::string> models;
  for (const std::string& id : ModelIds()) {
    if (seen.count(id)) models.push_back(id);
  }
  RateResult result;
  result.bradley_terry = FitAllDimensions(inputs, models, cfg_.rating,
                                          RatingMethod::kBradleyTerry);
  result.elo = FitAllDimensions(inputs, models, cfg_.rating, RatingMethod::kElo);

  std::vector<PipelineRun> runs;
  for (const auto& [id, run] : runs_) runs.push_back(run);
  std::map<std::string, double> accuracy;
  for (const std::string& id : ModelIds()) {
    try {
      accuracy[id] = Accuracy(runs, id);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kNoRuns) throw;
    }
  }
  result.bradley_terry_board = Rank(result.bradley_terry, accuracy);
  result.elo_board = Rank(result.elo, accuracy);
  result.leaderboard = cfg_.leaderboard_method == RatingMethod::kElo
                           ? result.elo_board
                           : result.bradley_terry_board;

  const std::filesystem::path& dir = cfg_.reports_dir;
  WriteFileAtomic(dir / "leaderboard.tsv", LeaderboardTsv(result.leaderboard));
  WriteFileAtomic(dir / "leaderboard.json",
                  LeaderboardJson(result.leaderboard).dump(2) + "\n");
  WriteFileAtomic(dir / "leaderboard_bt.tsv",
                  LeaderboardTsv(result.bradley_terry_board));
  WriteFileAtomic(dir / "leaderboard_elo.tsv", LeaderboardTsv(result.elo_board));

  if (append_snapshots) {
    for (const DimensionTables* tables : {&result.bradley_terry, &result.elo}) {
      for (const RatingTable& table : *tables) {
        json payload = SnapshotPayload(table);
        std::string key = SnapshotKey(table);
        auto it = latest_snapshot_.find(key);
        if (it != latest_snapshot_.end() && it->second == payload) continue;
        pool_->Append(RecordKind::kRatingSnapshot, payload);
        latest_snapshot_[key] = payload;
      }
    }
    MarkPhase("rate");
  }
  return result;
}

void Arena::Report() {
  Rate(/*append_snapshots=*/false);
  PoolView view = ParsePool(pool_->Snapshot());
  const std::filesystem::path& dir = cfg_.reports_dir;
  ValidityStats stats = ComputeValidityStats(view);
  WriteFileAtomic(dir / "participation.tsv", ParticipationTsv(stats));
  try {
    WriteFileAtomic(dir / "evolution_curve.tsv",
                    EvolutionCurveTsv(ComputeEvolutionCurve(view)));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kNoEvolutionData) throw;
    WriteFileAtomic(dir / "evolution_curve.tsv", EvolutionCurveTsv({}));
  }
  std::vector<BattleOutcome> rated = view.RatedOutcomes();
  WriteFileAtomic(dir / "consistency.tsv",
                  ConsistencyTsv(InterJudgeConsistency(view.judgments, rated)));
  json validity{{"planned_battles", stats.planned_battles},
                {"scheduled_battles", stats.scheduled_battles},
                {"valid_battles", stats.valid_battles},
                {"judgments", stats.judgments},
                {"valid_judgments", stats.valid_judgments},
                {"parse_failures_by_judge", stats.parse_failures_by_judge}};
  WriteFileAtomic(dir / "validity.json", validity.dump(2) + "\n");
  MarkPhase("report");
}

void Arena::RunAll() {
  Ingest();
  Run();
  Guideline();
  Judge();
  if (cfg_.evolver) Evolve();
  Rate();
  Report();
}

}  // namespace factarena

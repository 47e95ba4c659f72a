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

#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "factarena/cli.h"
#include "factarena/common.h"
#include "factarena/judgment.h"
#include "factarena/rating.h"
#include "factarena/scheduler.h"
#include "factarena/simharness.h"

namespace py = pybind11;

namespace factarena {
namespace {

using ResultTuple = std::tuple<std::string, std::string, double>;

std::vector<PairwiseResult> ToResults(const std::vector<ResultTuple>& rows) {
  std::vector<PairwiseResult> out;
  out.reserve(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& [a, b, score] = rows[i];
    out.push_back({std::to_string(i), a, b, score});
  }
  return out;
}

py::dict TableToDict(const RatingTable& t) {
  py::dict d;
  d["ratings"] = t.ratings;
  d["battle_count"] = t.battle_count;
  d["converged"] = t.converged;
  d["iterations"] = t.iterations;
  d["flags"] = t.flags;
  return d;
}

Outcome OutcomeFromName(const std::string& name) {
  auto o = ParseOutcomeName(name);
  if (!o) throw Error(ErrorCode::kInvalidArgument, "unknown outcome '" + name + "'");
  return *o;
}

std::vector<std::string> OutcomeNames(const DimensionOutcomes& outcomes) {
  std::vector<std::string> out;
  for (Outcome o : outcomes) out.emplace_back(OutcomeName(o));
  return out;
}

}  // namespace
}  // namespace factarena

PYBIND11_MODULE(_core, m) {
  using namespace factarena;
  m.doc() = "Rating, scheduling, judging and simulation primitives.";

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      PyErr_SetString(PyExc_ValueError,
                      (std::string(ErrorCodeName(e.code())) + ": " + e.what()).c_str());
    }
  });

  m.def("elo_expected", &EloExpected, py::arg("r_a"), py::arg("r_b"),
        py::arg("alpha") = 400.0);

  m.def(
      "elo_update",
      [](double r_a, double r_b, double score_a, double k_factor, double alpha) {
        RatingConfig cfg;
        cfg.k_factor = k_factor;
        cfg.alpha = alpha;
        EloPair p = EloUpdate(r_a, r_b, score_a, cfg);
        return std::make_pair(p.a, p.b);
      },
      py::arg("r_a"), py::arg("r_b"), py::arg("score_a"), py::arg("k_factor") = 4.0,
      py::arg("alpha") = 400.0);

  m.def(
      "elo_run",
      [](const std::vector<ResultTuple>& results, const std::vector<std::string>& models,
         double k_factor) {
        RatingConfig cfg;
        cfg.k_factor = k_factor;
        return TableToDict(EloRun(ToResults(results), models, cfg));
      },
      py::arg("results"), py::arg("models"), py::arg("k_factor") = 4.0,
      "Sequential Elo over (model_a, model_b, score_a) tuples.");

  m.def(
      "bt_fit",
      [](const std::vector<ResultTuple>& results, const std::vector<std::string>& models,
         double prior_strength, double tolerance, int max_iters) {
        RatingConfig cfg;
        cfg.prior_strength = prior_strength;
        cfg.bt_tolerance = tolerance;
        cfg.bt_max_iters = max_iters;
        cfg.Validate();
        return TableToDict(BtFit(BuildWinMatrix(ToResults(results), models), cfg));
      },
      py::arg("results"), py::arg("models"), py::arg("prior_strength") = 0.01,
      py::arg("tolerance") = 1e-8, py::arg("max_iters") = 1000,
      "Bradley-Terry fit over (model_a, model_b, score_a) tuples; ties are 0.5.");

  m.def(
      "build_plan",
      [](const std::vector<std::string>& claims, const std::vector<std::string>& models,
         int sample_size, uint64_t seed) {
        TournamentPlan plan = BuildPlan(claims, models, sample_size, seed);
        py::list out;
        for (const ClaimSchedule& s : plan.claims) {
          py::dict d;
          d["claim_id"] = s.claim_id;
          d["models"] = s.models;
          d["pairs"] = s.pairs;
          out.append(d);
        }
        return out;
      },
      py::arg("claims"), py::arg("models"), py::arg("sample_size"), py::arg("seed"));

  m.def(
      "simulate",
      [](int models, double spacing, int battles_per_pair, double tie_rate,
         uint64_t seed, double prior_strength) {
        SimConfig cfg;
        cfg.models = SpacedModels(models, spacing);
        cfg.battles_per_pair = battles_per_pair;
        cfg.tie_rate = tie_rate;
        cfg.seed = seed;
        SimResult sim = SimulateTournament(cfg);
        RatingConfig rating;
        rating.prior_strength = prior_strength;
        RatingTable fitted = BtFit(sim.overall, rating);
        Recovery r = RecoveryScore(fitted, cfg);
        py::dict d;
        d["battles"] = sim.outcomes.size();
        d["ratings"] = fitted.ratings;
        d["spearman"] = r.spearman;
        d["max_gap_error"] = r.max_gap_error;
        return d;
      },
      py::arg("models") = 8, py::arg("spacing") = 50.0,
      py::arg("battles_per_pair") = 100, py::arg("tie_rate") = 0.1, py::arg("seed") = 0,
      py::arg("prior_strength") = 0.01,
      "Synthetic tournament with planted skills and its BT recovery.");

  m.def(
      "parse_vote",
      [](const std::string& text, const std::string& order) -> py::object {
        auto parsed = ParseVoteBlock(text);
        if (!parsed) return py::none();
        PresentationOrder po = order == "BA" ? PresentationOrder::kBA : PresentationOrder::kAB;
        DimensionOutcomes outcomes{};
        for (int d = 0; d < kNumDimensions; ++d) {
          outcomes[d] = Canonicalize(parsed->votes[d], po);
        }
        py::dict out;
        out["rationale"] = parsed->rationale;
        out["outcomes"] = OutcomeNames(outcomes);
        return out;
      },
      py::arg("text"), py::arg("order") = "AB",
      "Parses a judge vote block into canonical per-dimension outcomes.");

  m.def(
      "majority_vote",
      [](const std::vector<std::vector<std::string>>& votes, int quorum) {
        std::vector<JudgmentRecord> records;
        for (size_t i = 0; i < votes.size(); ++i) {
          if (votes[i].size() != static_cast<size_t>(kNumDimensions)) {
            throw Error(ErrorCode::kInvalidArgument, "each vote needs seven outcomes");
          }
          JudgmentRecord r;
          r.battle_id = "battle";
          r.judge_id = "judge" + std::to_string(i);
          r.valid = true;
          for (int d = 0; d < kNumDimensions; ++d) {
            r.vote.outcomes[d] = OutcomeFromName(votes[i][d]);
          }
          records.push_back(r);
        }
        BattleOutcome o = MajorityVote(records, quorum);
        return std::make_pair(OutcomeNames(o.outcomes), o.quorum_met);
      },
      py::arg("votes"), py::arg("quorum") = kDefaultQuorum);

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        cli::DispatchResult r;
        {
          py::gil_scoped_release release;
          r = cli::Dispatch(args, out, err);
        }
        py::dict d;
        d["exit_code"] = r.exit_code;
        d["provider_calls"] = r.provider_calls;
        d["stdout"] = out.str();
        d["stderr"] = err.str();
        return d;
      },
      py::arg("args"), "Runs a command line subcommand in process.");

  m.attr("DIMENSIONS") = [] {
    std::vector<std::string> names;
    for (Dimension d : kAllDimensions) names.emplace_back(DimensionName(d));
    return names;
  }();
}

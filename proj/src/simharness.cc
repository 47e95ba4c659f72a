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

#include "factarena/simharness.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "factarena/common.h"

namespace factarena {

void SimConfig::Validate() const {
  if (models.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "simulation needs two models");
  }
  if (battles_per_pair < 1) {
    throw Error(ErrorCode::kInvalidArgument, "battles_per_pair must be >= 1");
  }
  if (!(tie_rate >= 0 && tie_rate <= 1)) {
    throw Error(ErrorCode::kInvalidArgument, "tie_rate must be in [0, 1]");
  }
  if (!(alpha > 0)) throw Error(ErrorCode::kInvalidArgument, "alpha <= 0");
  for (const SyntheticModel& m : models) {
    if (!(m.verdict_accuracy >= 0 && m.verdict_accuracy <= 1)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "verdict_accuracy of " + m.model_id + " outside [0, 1]");
    }
  }
}

std::vector<SyntheticModel> SpacedModels(int count, double spacing,
                                         double start) {
  std::vector<SyntheticModel> models;
  for (int i = 0; i < count; ++i) {
    models.push_back({"m" + std::to_string(i), start + spacing * i, 1.0});
  }
  return models;
}

SimResult SimulateTournament(const SimConfig& cfg) {
  cfg.Validate();
  SimResult result;
  for (const SyntheticModel& m : cfg.models) result.models.push_back(m.model_id);
  result.overall = WinMatrix(result.models);
  const int overall = static_cast<int>(Dimension::kOverall);
  for (size_t i = 0; i < cfg.models.size(); ++i) {
    for (size_t j = i + 1; j < cfg.models.size(); ++j) {
      const SyntheticModel& a = cfg.models[i];
      const SyntheticModel& b = cfg.models[j];
      Rng rng(DeriveSeed(cfg.seed, "sim/" + a.model_id + "/" + b.model_id));
      const double p = EloExpected(a.latent_skill, b.latent_skill, cfg.alpha);
      for (int k = 0; k < cfg.battles_per_pair; ++k) {
        BattleOutcome o;
        o.battle_id = "sim/" + a.model_id + "/" + b.model_id + "/" +
                      std::to_string(k);
        o.claim_id = "sim/" + std::to_string(k);
        o.model_a = a.model_id;
        o.model_b = b.model_id;
        o.quorum_met = true;
        o.synthetic = true;
        for (Outcome& outcome : o.outcomes) {
          if (rng.Bernoulli(cfg.tie_rate)) {
            outcome = Outcome::kTie;
          } else {
            outcome = rng.Bernoulli(p) ? Outcome::kA : Outcome::kB;
          }
        }
        result.overall.AddResult(o.model_a, o.model_b,
                                 ScoreForA(o.outcomes[overall]));
        result.outcomes.push_back(std::move(o));
      }
    }
  }
  return result;
}

void AppendSimulatedPool(RecordPool& pool, const SimResult& result) {
  for (const BattleOutcome& o : result.outcomes) {
    pool.Append(RecordKind::kOutcome, nlohmann::json(o));
  }
}

namespace {

std::vector<double> AverageRanks(std::span<const double> values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t x, size_t y) { return values[x] < values[y]; });
  std::vector<double> ranks(values.size());
  for (size_t i = 0; i < order.size();) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) {
      ++j;
    }
    double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double Spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw Error(ErrorCode::kInvalidArgument, "Spearman needs paired samples");
  }
  std::vector<double> rx = AverageRanks(x), ry = AverageRanks(y);
  const double n = static_cast<double>(x.size());
  double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
  double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
  double sxy = 0, sxx = 0, syy = 0;
  for (size_t i = 0; i < rx.size(); ++i) {
    sxy += (rx[i] - mx) * (ry[i] - my);
    sxx += (rx[i] - mx) * (rx[i] - mx);
    syy += (ry[i] - my) * (ry[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

Recovery RecoveryScore(const RatingTable& fitted, const SimConfig& cfg) {
  std::vector<double> skills, ratings;
  for (const SyntheticModel& m : cfg.models) {
    skills.push_back(m.latent_skill);
    ratings.push_back(fitted.Rating(m.model_id));
  }
  Recovery recovery;
  recovery.spearman = Spearman(skills, ratings);
  for (size_t i = 0; i < skills.size(); ++i) {
    for (size_t j = i + 1; j < skills.size(); ++j) {
      double error = std::abs((ratings[i] - ratings[j]) -
                              (skills[i] - skills[j]));
      recovery.max_gap_error = std::max(recovery.max_gap_error, error);
    }
  }
  return recovery;
}

}  // namespace factarena

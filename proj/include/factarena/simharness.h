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

// Synthetic-skill tournaments for validating the judging and rating stack.

#ifndef FACTARENA_SIMHARNESS_H_
#define FACTARENA_SIMHARNESS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "factarena/judgment.h"
#include "factarena/rating.h"
#include "factarena/storage.h"

namespace factarena {

struct SyntheticModel {
  std::string model_id;
  double latent_skill = 1000.0;  // Elo scale
  double verdict_accuracy = 1.0;
};

struct SimConfig {
  std::vector<SyntheticModel> models;
  int battles_per_pair = 100;
  double tie_rate = 0.0;
  uint64_t seed = 0;
  double alpha = 400.0;

  void Validate() const;
};

// `count` models named m0, m1, ... with skills start, start + spacing, ...
std::vector<SyntheticModel> SpacedModels(int count, double spacing,
                                         double start = 1000.0);

struct SimResult {
  std::vector<std::string> models;
  // One synthetic outcome per battle, every dimension drawn independently.
  std::vector<BattleOutcome> outcomes;
  WinMatrix overall;
};

// Each battle and dimension: with probability tie_rate a tie, otherwise a
// wins with the Elo expectation of the latent skills. Deterministic in seed.
SimResult SimulateTournament(const SimConfig& cfg);

// Appends every outcome as an "outcome" record.
void AppendSimulatedPool(RecordPool& pool, const SimResult& result);

struct Recovery {
  double spearman = 0.0;
  double max_gap_error = 0.0;
};

// Spearman correlation with average ranks for ties.
double Spearman(std::span<const double> x, std::span<const double> y);

Recovery RecoveryScore(const RatingTable& fitted, const SimConfig& cfg);

}  // namespace factarena

#endif  // FACTARENA_SIMHARNESS_H_

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

// Which models answer each claim and which pairs battle.

#ifndef FACTARENA_SCHEDULER_H_
#define FACTARENA_SCHEDULER_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace factarena {

using ModelPair = std::pair<std::string, std::string>;

struct ClaimSchedule {
  std::string claim_id;
  std::vector<std::string> models;  // sampled, in draw order
  std::vector<ModelPair> pairs;     // all C(s, 2) unordered pairs

  bool operator==(const ClaimSchedule&) const = default;
};

struct TournamentPlan {
  uint64_t seed = 0;
  int sample_size = 0;
  std::vector<ClaimSchedule> claims;

  bool operator==(const TournamentPlan&) const = default;
};

// Every unordered pair of `models`, (models[i], models[j]) for i < j.
std::vector<ModelPair> AllPairs(std::span<const std::string> models);

// For each claim, draws `sample_size` distinct models uniformly (a fresh
// stream per claim id, so a claim's draw does not depend on its position)
// and schedules all pairs among them.
// Errors: kPoolTooSmall (sample_size > pool), kInvalidArgument (sample_size
// < 2 or duplicate pool entries).
TournamentPlan BuildPlan(std::span<const std::string> claim_ids,
                         std::span<const std::string> model_pool,
                         int sample_size, uint64_t seed);

// Schedules `claim_id` against an already chosen model set (used for
// evolved claims, which inherit their parent's participants).
ClaimSchedule ScheduleWithModels(const std::string& claim_id,
                                 std::vector<std::string> models);

struct PlanStats {
  int64_t total_battles = 0;
  // |claims| * (s / |pool|) * (s - 1) for every model in the pool.
  std::map<std::string, double> expected_participation;
  std::map<std::string, int64_t> scheduled_participation;
  // Keyed by the lexicographically ordered pair.
  std::map<ModelPair, int64_t> per_pair;
  double mean_per_pair = 0.0;  // total / C(|pool|, 2)
};

PlanStats ComputePlanStats(const TournamentPlan& plan,
                           std::span<const std::string> model_pool);

void to_json(nlohmann::json& j, const ClaimSchedule& s);
void from_json(const nlohmann::json& j, ClaimSchedule& s);

}  // namespace factarena

#endif  // FACTARENA_SCHEDULER_H_

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

#include "factarena/scheduler.h"

#include <numeric>
#include <set>

#include "factarena/common.h"

namespace factarena {

std::vector<ModelPair> AllPairs(std::span<const std::string> models) {
  std::vector<ModelPair> pairs;
  for (size_t i = 0; i < models.size(); ++i) {
    for (size_t j = i + 1; j < models.size(); ++j) {
      pairs.emplace_back(models[i], models[j]);
    }
  }
  return pairs;
}

ClaimSchedule ScheduleWithModels(const std::string& claim_id,
                                 std::vector<std::string> models) {
  ClaimSchedule schedule;
  schedule.claim_id = claim_id;
  schedule.pairs = AllPairs(models);
  schedule.models = std::move(models);
  return schedule;
}

TournamentPlan BuildPlan(std::span<const std::string> claim_ids,
                         std::span<const std::string> model_pool,
                         int sample_size, uint64_t seed) {
  if (sample_size < 2) {
    throw Error(ErrorCode::kInvalidArgument, "sample size must be at least 2");
  }
  if (static_cast<size_t>(sample_size) > model_pool.size()) {
    throw Error(ErrorCode::kPoolTooSmall,
                "sample size " + std::to_string(sample_size) +
                    " exceeds pool of " + std::to_string(model_pool.size()));
  }
  std::set<std::string> unique(model_pool.begin(), model_pool.end());
  if (unique.size() != model_pool.size()) {
    throw Error(ErrorCode::kInvalidArgument, "duplicate model in pool");
  }
  TournamentPlan plan;
  plan.seed = seed;
  plan.sample_size = sample_size;
  std::vector<size_t> indices(model_pool.size());
  for (const std::string& claim_id : claim_ids) {
    Rng rng(DeriveSeed(seed, "plan/" + claim_id));
    std::iota(indices.begin(), indices.end(), size_t{0});
    // Partial Fisher-Yates: the first sample_size slots are the draw.
    std::vector<std::string> sampled;
    for (int i = 0; i < sample_size; ++i) {
      size_t j = i + rng.UniformInt(indices.size() - i);
      std::swap(indices[i], indices[j]);
      sampled.push_back(model_pool[indices[i]]);
    }
    plan.claims.push_back(ScheduleWithModels(claim_id, std::move(sampled)));
  }
  return plan;
}

PlanStats ComputePlanStats(const TournamentPlan& plan,
                           std::span<const std::string> model_pool) {
  PlanStats stats;
  const double n = static_cast<double>(model_pool.size());
  const double s = plan.sample_size;
  for (const std::string& model : model_pool) {
    stats.expected_participation[model] =
        n > 0 ? static_cast<double>(plan.claims.size()) * (s / n) * (s - 1)
              : 0.0;
    stats.scheduled_participation[model] = 0;
  }
  for (const ClaimSchedule& schedule : plan.claims) {
    stats.total_battles += static_cast<int64_t>(schedule.pairs.size());
    for (const auto& [a, b] : schedule.pairs) {
      ++stats.scheduled_participation[a];
      ++stats.scheduled_participation[b];
      ++stats.per_pair[a < b ? ModelPair{a, b} : ModelPair{b, a}];
    }
  }
  const double pair_count = n * (n - 1) / 2;
  stats.mean_per_pair =
      pair_count > 0 ? static_cast<double>(stats.total_battles) / pair_count
                     : 0.0;
  return stats;
}

void to_json(nlohmann::json& j, const ClaimSchedule& s) {
  nlohmann::json pairs = nlohmann::json::array();
  for (const auto& [a, b] : s.pairs) pairs.push_back({a, b});
  j = nlohmann::json{
      {"claim_id", s.claim_id}, {"models", s.models}, {"pairs", pairs}};
}

void from_json(const nlohmann::json& j, ClaimSchedule& s) {
  s.claim_id = j.at("claim_id").get<std::string>();
  s.models = j.at("models").get<std::vector<std::string>>();
  s.pairs.clear();
  for (const auto& p : j.at("pairs")) {
    s.pairs.emplace_back(p.at(0).get<std::string>(), p.at(1).get<std::string>());
  }
}

}  // namespace factarena

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

// Elo and Bradley-Terry ratings over battle outcomes, plus leaderboards.

#ifndef FACTARENA_RATING_H_
#define FACTARENA_RATING_H_

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "factarena/common.h"
#include "factarena/judgment.h"
#include "factarena/pipeline.h"
#include "json.hpp"

namespace factarena {

enum class RatingMethod { kElo, kBradleyTerry };

std::string_view RatingMethodName(RatingMethod method);
RatingMethod ParseRatingMethodName(std::string_view name);

struct RatingConfig {
  double alpha = 400.0;
  double k_factor = 4.0;
  double initial_rating = 1000.0;
  double center = 1000.0;
  double bt_tolerance = 1e-8;
  int bt_max_iters = 1000;
  // Gaussian prior on natural-scale strengths; 0 disables it.
  double prior_strength = 0.01;

  // Throws kInvalidArgument unless alpha > 0, k_factor > 0, lambda >= 0.
  void Validate() const;
};

// One decided comparison. score_a is 1 (a wins), 0 (b wins) or 0.5 (tie).
struct PairwiseResult {
  std::string battle_id;
  std::string model_a;
  std::string model_b;
  double score_a = 0.5;
};

std::vector<PairwiseResult> ResultsForDimension(
    std::span<const BattleOutcome> outcomes, Dimension dimension);

// Dense square matrix of (half-)wins. W(a, b) is the mass of a over b.
class WinMatrix {
 public:
  WinMatrix() = default;
  explicit WinMatrix(std::vector<std::string> models);

  const std::vector<std::string>& models() const { return models_; }
  size_t size() const { return models_.size(); }
  // -1 when absent.
  int IndexOf(const std::string& model) const;

  double operator()(size_t a, size_t b) const { return w_[a * size() + b]; }
  double Wins(const std::string& a, const std::string& b) const;

  // Adds one comparison; a tie puts 0.5 on each side. kUnknownModel if
  // either id is absent, kInvalidArgument for a == b.
  void AddResult(const std::string& a, const std::string& b, double score_a);
  void AddWins(const std::string& a, const std::string& b, double mass);

  double TotalMass() const;

  bool operator==(const WinMatrix&) const = default;

 private:
  size_t Require(const std::string& model) const;

  std::vector<std::string> models_;
  std::unordered_map<std::string, size_t> index_;
  std::vector<double> w_;
};

WinMatrix BuildWinMatrix(std::span<const PairwiseResult> results,
                         std::vector<std::string> models);

struct RatingTable {
  Dimension dimension = Dimension::kOverall;
  RatingMethod method = RatingMethod::kBradleyTerry;
  std::vector<std::string> models;
  std::map<std::string, double> ratings;
  std::map<std::string, int64_t> battle_count;
  // Elo only: battle ids in the order they were folded in.
  std::vector<std::string> processing_order;
  bool converged = true;
  int iterations = 0;
  // E.g. "NotConverged", "DisconnectedGraph".
  std::vector<std::string> flags;

  double Rating(const std::string& model) const;
  bool HasFlag(std::string_view flag) const;
};

double EloExpected(double r_a, double r_b, double alpha);

struct EloPair {
  double a = 0.0;
  double b = 0.0;
};
EloPair EloUpdate(double r_a, double r_b, double score_a,
                  const RatingConfig& cfg);

// Sequential fold from cfg.initial_rating. kUnknownModel if a result names
// a model outside `models`.
RatingTable EloRun(std::span<const PairwiseResult> results,
                   const std::vector<std::string>& models,
                   const RatingConfig& cfg);

// Sum over a != b of W(a, b) * log P(a beats b), minus the prior term
// lambda * sum(theta_i^2) with theta_i = (R_i - center) * ln(10) / alpha.
// `ratings` is aligned with w.models(). kNonFinite on degenerate input.
double BtLogLikelihood(std::span<const double> ratings, const WinMatrix& w,
                       double alpha, double lambda = 0.0,
                       double center = 1000.0);

// Minorization-maximization fit. With lambda = 0 a disconnected comparison
// graph throws kDisconnectedGraph; a connected but not strongly connected
// one returns the last iterate flagged "NotConverged".
RatingTable BtFit(const WinMatrix& w, const RatingConfig& cfg);

using DimensionTables = std::array<RatingTable, kNumDimensions>;

DimensionTables FitAllDimensions(std::span<const BattleOutcome> outcomes,
                                 const std::vector<std::string>& models,
                                 const RatingConfig& cfg, RatingMethod method);

// Percentage of correct runs among valid runs of `model_id`. kNoRuns when
// the model has no valid run.
double Accuracy(std::span<const PipelineRun> runs, const std::string& model_id);

struct LeaderboardRow {
  int rank = 0;
  std::string model_id;
  int64_t battle_count = 0;
  std::array<double, kNumDimensions> ratings{};
  std::optional<double> accuracy;
};

struct Leaderboard {
  RatingMethod method = RatingMethod::kBradleyTerry;
  std::vector<LeaderboardRow> rows;
};

// Sorted by Overall rating desc, then battle count desc, then model id.
Leaderboard Rank(const DimensionTables& tables,
                 const std::map<std::string, double>& accuracy);

std::string LeaderboardTsv(const Leaderboard& board);
nlohmann::json LeaderboardJson(const Leaderboard& board);

void to_json(nlohmann::json& j, const RatingTable& t);
void from_json(const nlohmann::json& j, RatingTable& t);

}  // namespace factarena

#endif  // FACTARENA_RATING_H_

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

#include "factarena/rating.h"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numeric>
#include <sstream>

namespace factarena {
namespace {

const double kLn10 = std::log(10.0);
// Natural-scale strengths are clamped to keep exp() finite when the MLE
// runs off to infinity.
constexpr double kThetaClamp = 40.0;

// log(1 + exp(x)) without overflow.
double Softplus(double x) {
  return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x)));
}

std::vector<int> Components(const WinMatrix& w, bool directed_strong) {
  const size_t n = w.size();
  // Undirected components, or strongly connected components when asked.
  auto reach = [&](size_t start, bool forward) {
    std::vector<char> seen(n, 0);
    std::vector<size_t> stack = {start};
    seen[start] = 1;
    while (!stack.empty()) {
      size_t i = stack.back();
      stack.pop_back();
      for (size_t j = 0; j < n; ++j) {
        if (seen[j]) continue;
        double mass = directed_strong ? (forward ? w(i, j) : w(j, i))
                                      : w(i, j) + w(j, i);
        if (mass > 0) {
          seen[j] = 1;
          stack.push_back(j);
        }
      }
    }
    return seen;
  };
  std::vector<int> label(n, -1);
  int next = 0;
  for (size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    std::vector<char> fwd = reach(i, true);
    std::vector<char> bwd = directed_strong ? reach(i, false) : fwd;
    for (size_t j = 0; j < n; ++j) {
      if (fwd[j] && bwd[j] && label[j] < 0) label[j] = next;
    }
    ++next;
  }
  return label;
}

int CountComponents(const std::vector<int>& labels) {
  return labels.empty()
             ? 0
             : *std::max_element(labels.begin(), labels.end()) + 1;
}

// Root of wins - d * exp(t) - 2 * lambda * t, a strictly decreasing
// function of t, by bracketed Newton.
double SolveCoordinate(double wins, double d, double lambda, double start) {
  auto f = [&](double t) { return wins - d * std::exp(t) - 2 * lambda * t; };
  double lo = start, hi = start;
  double step = 1.0;
  if (f(start) > 0) {
    while (f(hi) > 0 && hi < kThetaClamp) {
      lo = hi;
      hi += step;
      step *= 2;
    }
    if (f(hi) > 0) return kThetaClamp;
  } else {
    while (f(lo) < 0 && lo > -kThetaClamp) {
      hi = lo;
      lo -= step;
      step *= 2;
    }
    if (f(lo) < 0) return -kThetaClamp;
  }
  double t = std::clamp(start, lo, hi);
  for (int iter = 0; iter < 200; ++iter) {
    double value = f(t);
    if (value == 0) return t;
    if (value > 0) {
      lo = t;
    } else {
      hi = t;
    }
    double slope = -d * std::exp(t) - 2 * lambda;
    double next = t - value / slope;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - t) <= 1e-15 * std::max(1.0, std::abs(t))) {
      return next;
    }
    t = next;
  }
  return t;
}

std::string FormatFixed(double value, int digits) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(digits) << value;
  return out.str();
}

}  // namespace

std::string_view RatingMethodName(RatingMethod method) {
  return method == RatingMethod::kElo ? "Elo" : "BradleyTerry";
}

RatingMethod ParseRatingMethodName(std::string_view name) {
  if (name == "Elo" || name == "elo") return RatingMethod::kElo;
  if (name == "BradleyTerry" || name == "bt" || name == "bradley-terry") {
    return RatingMethod::kBradleyTerry;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown rating method '" + std::string(name) + "'");
}

void RatingConfig::Validate() const {
  if (!(alpha > 0)) throw Error(ErrorCode::kInvalidArgument, "alpha must be > 0");
  if (!(k_factor > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "k_factor must be > 0");
  }
  if (!(prior_strength >= 0)) {
    throw Error(ErrorCode::kInvalidArgument, "prior_strength must be >= 0");
  }
  if (!(bt_tolerance > 0) || bt_max_iters < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "bt_tolerance must be > 0 and bt_max_iters >= 1");
  }
}

std::vector<PairwiseResult> ResultsForDimension(
    std::span<const BattleOutcome> outcomes, Dimension dimension) {
  std::vector<PairwiseResult> results;
  results.reserve(outcomes.size());
  for (const BattleOutcome& o : outcomes) {
    results.push_back({o.battle_id, o.model_a, o.model_b,
                       ScoreForA(o.outcomes[static_cast<int>(dimension)])});
  }
  return results;
}

WinMatrix::WinMatrix(std::vector<std::string> models)
    : models_(std::move(models)), w_(models_.size() * models_.size(), 0.0) {
  for (size_t i = 0; i < models_.size(); ++i) {
    if (!index_.emplace(models_[i], i).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  "duplicate model '" + models_[i] + "'");
    }
  }
}

int WinMatrix::IndexOf(const std::string& model) const {
  auto it = index_.find(model);
  return it == index_.end() ? -1 : static_cast<int>(it->second);
}

size_t WinMatrix::Require(const std::string& model) const {
  auto it = index_.find(model);
  if (it == index_.end()) {
    throw Error(ErrorCode::kUnknownModel, "unknown model '" + model + "'");
  }
  return it->second;
}

double WinMatrix::Wins(const std::string& a, const std::string& b) const {
  return (*this)(Require(a), Require(b));
}

void WinMatrix::AddWins(const std::string& a, const std::string& b,
                        double mass) {
  size_t i = Require(a), j = Require(b);
  if (i == j) throw Error(ErrorCode::kInvalidArgument, "self comparison");
  if (!(mass >= 0) || !std::isfinite(mass)) {
    throw Error(ErrorCode::kInvalidArgument, "win mass must be >= 0");
  }
  w_[i * size() + j] += mass;
}

void WinMatrix::AddResult(const std::string& a, const std::string& b,
                          double score_a) {
  if (score_a != 0.0 && score_a != 0.5 && score_a != 1.0) {
    throw Error(ErrorCode::kInvalidArgument, "score must be 0, 0.5 or 1");
  }
  Require(a);
  Require(b);
  if (a == b) throw Error(ErrorCode::kInvalidArgument, "self comparison");
  if (score_a > 0) AddWins(a, b, score_a);
  if (score_a < 1) AddWins(b, a, 1.0 - score_a);
}

double WinMatrix::TotalMass() const {
  return std::accumulate(w_.begin(), w_.end(), 0.0);
}

WinMatrix BuildWinMatrix(std::span<const PairwiseResult> results,
                         std::vector<std::string> models) {
  WinMatrix w(std::move(models));
  for (const PairwiseResult& r : results) {
    w.AddResult(r.model_a, r.model_b, r.score_a);
  }
  return w;
}

double RatingTable::Rating(const std::string& model) const {
  auto it = ratings.find(model);
  if (it == ratings.end()) {
    throw Error(ErrorCode::kUnknownModel, "no rating for '" + model + "'");
  }
  return it->second;
}

bool RatingTable::HasFlag(std::string_view flag) const {
  return std::find(flags.begin(), flags.end(), flag) != flags.end();
}

double EloExpected(double r_a, double r_b, double alpha) {
  if (!(alpha > 0)) throw Error(ErrorCode::kInvalidArgument, "alpha <= 0");
  return 1.0 / (1.0 + std::pow(10.0, (r_b - r_a) / alpha));
}

EloPair EloUpdate(double r_a, double r_b, double score_a,
                  const RatingConfig& cfg) {
  double delta = cfg.k_factor * (score_a - EloExpected(r_a, r_b, cfg.alpha));
  return {r_a + delta, r_b - delta};
}

RatingTable EloRun(std::span<const PairwiseResult> results,
                   const std::vector<std::string>& models,
                   const RatingConfig& cfg) {
  cfg.Validate();
  RatingTable table;
  table.method = RatingMethod::kElo;
  table.models = models;
  for (const std::string& m : models) {
    table.ratings[m] = cfg.initial_rating;
    table.battle_count[m] = 0;
  }
  for (const PairwiseResult& r : results) {
    auto a = table.ratings.find(r.model_a);
    auto b = table.ratings.find(r.model_b);
    if (a == table.ratings.end() || b == table.ratings.end()) {
      throw Error(ErrorCode::kUnknownModel,
                  "battle '" + r.battle_id + "' names a model outside the pool");
    }
    EloPair next = EloUpdate(a->second, b->second, r.score_a, cfg);
    a->second = next.a;
    b->second = next.b;
    ++table.battle_count[r.model_a];
    ++table.battle_count[r.model_b];
    table.processing_order.push_back(
        r.battle_id.empty() ? r.model_a + " vs " + r.model_b : r.battle_id);
  }
  return table;
}

double BtLogLikelihood(std::span<const double> ratings, const WinMatrix& w,
                       double alpha, double lambda, double center) {
  if (!(alpha > 0)) throw Error(ErrorCode::kInvalidArgument, "alpha <= 0");
  if (ratings.size() != w.size()) {
    throw Error(ErrorCode::kInvalidArgument, "ratings/matrix size mismatch");
  }
  const double scale = kLn10 / alpha;
  double total = 0.0;
  for (size_t a = 0; a < w.size(); ++a) {
    if (!std::isfinite(ratings[a])) {
      throw Error(ErrorCode::kNonFinite, "non-finite rating");
    }
    for (size_t b = 0; b < w.size(); ++b) {
      if (a == b || w(a, b) == 0) continue;
      total -= w(a, b) * Softplus((ratings[b] - ratings[a]) * scale);
    }
    if (lambda > 0) {
      double theta = (ratings[a] - center) * scale;
      total -= lambda * theta * theta;
    }
  }
  if (!std::isfinite(total)) {
    throw Error(ErrorCode::kNonFinite, "log-likelihood is not finite");
  }
  return total;
}

RatingTable BtFit(const WinMatrix& w, const RatingConfig& cfg) {
  cfg.Validate();
  const size_t n = w.size();
  const double lambda = cfg.prior_strength;
  RatingTable table;
  table.method = RatingMethod::kBradleyTerry;
  table.models = w.models();

  std::vector<double> wins(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) wins[i] += w(i, j);
    double comparisons = 0.0;
    for (size_t j = 0; j < n; ++j) comparisons += w(i, j) + w(j, i);
    table.battle_count[w.models()[i]] = std::llround(comparisons);
  }

  bool structurally_divergent = false;
  if (n > 1) {
    if (CountComponents(Components(w, false)) > 1) {
      if (lambda == 0) {
        throw Error(ErrorCode::kDisconnectedGraph,
                    "comparison graph is disconnected and no prior is set");
      }
      table.flags.push_back("DisconnectedGraph");
    }
    if (lambda == 0 && CountComponents(Components(w, true)) > 1) {
      structurally_divergent = true;
    }
  }

  std::vector<double> theta(n, 0.0);
  auto recenter = [&] {
    if (n == 0) return;
    double mean = std::accumulate(theta.begin(), theta.end(), 0.0) / n;
    for (double& t : theta) t -= mean;
  };
  const double threshold = cfg.bt_tolerance * kLn10;  // |dR| < tol * alpha
  bool converged = false;
  int iter = 0;
  std::vector<double> previous;
  while (iter < cfg.bt_max_iters && !converged && n > 1) {
    ++iter;
    previous = theta;
    for (size_t i = 0; i < n; ++i) {
      double d = 0.0;
      const double p_i = std::exp(theta[i]);
      for (size_t j = 0; j < n; ++j) {
        if (j == i) continue;
        double pair = w(i, j) + w(j, i);
        if (pair > 0) d += pair / (p_i + std::exp(theta[j]));
      }
      double next;
      if (lambda > 0) {
        next = SolveCoordinate(wins[i], d, lambda, theta[i]);
      } else if (d == 0) {
        next = theta[i];
      } else if (wins[i] == 0) {
        next = theta[i] - 1.0;
      } else {
        next = std::log(wins[i] / d);
      }
      theta[i] = std::clamp(next, -kThetaClamp, kThetaClamp);
    }
    recenter();
    double max_change = 0.0;
    for (size_t i = 0; i < n; ++i) {
      max_change = std::max(max_change, std::abs(theta[i] - previous[i]));
    }
    converged = max_change < threshold;
  }
  if (n <= 1) converged = true;
  recenter();
  table.iterations = iter;
  table.converged = converged && !structurally_divergent;
  if (!table.converged) table.flags.push_back("NotConverged");
  const double to_elo = cfg.alpha / kLn10;
  for (size_t i = 0; i < n; ++i) {
    table.ratings[w.models()[i]] = cfg.center + theta[i] * to_elo;
  }
  return table;
}

DimensionTables FitAllDimensions(std::span<const BattleOutcome> outcomes,
                                 const std::vector<std::string>& models,
                                 const RatingConfig& cfg,
                                 RatingMethod method) {
  DimensionTables tables;
  for (Dimension dim : kAllDimensions) {
    std::vector<PairwiseResult> results = ResultsForDimension(outcomes, dim);
    RatingTable table = method == RatingMethod::kElo
                            ? EloRun(results, models, cfg)
                            : BtFit(BuildWinMatrix(results, models), cfg);
    table.dimension = dim;
    tables[static_cast<int>(dim)] = std::move(table);
  }
  return tables;
}

double Accuracy(std::span<const PipelineRun> runs,
                const std::string& model_id) {
  int64_t valid = 0, correct = 0;
  for (const PipelineRun& run : runs) {
    if (run.model_id != model_id || !run.valid) continue;
    ++valid;
    if (run.correct) ++correct;
  }
  if (valid == 0) {
    throw Error(ErrorCode::kNoRuns, "no valid runs for '" + model_id + "'");
  }
  return 100.0 * static_cast<double>(correct) / static_cast<double>(valid);
}

Leaderboard Rank(const DimensionTables& tables,
                 const std::map<std::string, double>& accuracy) {
  const RatingTable& overall = tables[static_cast<int>(Dimension::kOverall)];
  Leaderboard board;
  board.method = overall.method;
  for (const std::string& model : overall.models) {
    LeaderboardRow row;
    row.model_id = model;
    auto count = overall.battle_count.find(model);
    row.battle_count = count == overall.battle_count.end() ? 0 : count->second;
    for (Dimension dim : kAllDimensions) {
      const RatingTable& t = tables[static_cast<int>(dim)];
      auto it = t.ratings.find(model);
      row.ratings[static_cast<int>(dim)] =
          it == t.ratings.end() ? std::numeric_limits<double>::quiet_NaN()
                                : it->second;
    }
    auto acc = accuracy.find(model);
    if (acc != accuracy.end()) row.accuracy = acc->second;
    board.rows.push_back(std::move(row));
  }
  const int kOv = static_cast<int>(Dimension::kOverall);
  std::sort(board.rows.begin(), board.rows.end(),
            [kOv](const LeaderboardRow& x, const LeaderboardRow& y) {
              if (x.ratings[kOv] != y.ratings[kOv]) {
                return x.ratings[kOv] > y.ratings[kOv];
              }
              if (x.battle_count != y.battle_count) {
                return x.battle_count > y.battle_count;
              }
              return x.model_id < y.model_id;
            });
  for (size_t i = 0; i < board.rows.size(); ++i) {
    board.rows[i].rank = static_cast<int>(i) + 1;
  }
  return board;
}

std::string LeaderboardTsv(const Leaderboard& board) {
  std::ostringstream out;
  out << "Rank\tModel\tBattle Count";
  for (Dimension dim : kAllDimensions) out << '\t' << DimensionLabel(dim);
  out << "\tAcc.(%)\n";
  for (const LeaderboardRow& row : board.rows) {
    out << row.rank << '\t' << row.model_id << '\t' << row.battle_count;
    for (double r : row.ratings) {
      out << '\t' << (std::isfinite(r) ? FormatFixed(r, 2) : "-");
    }
    out << '\t' << (row.accuracy ? FormatFixed(*row.accuracy, 2) : "-")
        << '\n';
  }
  return out.str();
}

nlohmann::json LeaderboardJson(const Leaderboard& board) {
  nlohmann::json rows = nlohmann::json::array();
  for (const LeaderboardRow& row : board.rows) {
    nlohmann::json ratings = nlohmann::json::object();
    for (Dimension dim : kAllDimensions) {
      double r = row.ratings[static_cast<int>(dim)];
      ratings[std::string(DimensionLabel(dim))] =
          std::isfinite(r) ? nlohmann::json(r) : nlohmann::json(nullptr);
    }
    rows.push_back({{"rank", row.rank},
                    {"model", row.model_id},
                    {"battle_count", row.battle_count},
                    {"ratings", ratings},
                    {"accuracy", row.accuracy ? nlohmann::json(*row.accuracy)
                                              : nlohmann::json(nullptr)}});
  }
  return {{"method", RatingMethodName(board.method)}, {"rows", rows}};
}

void to_json(nlohmann::json& j, const RatingTable& t) {
  j = nlohmann::json{{"dimension", DimensionName(t.dimension)},
                     {"method", RatingMethodName(t.method)},
                     {"models", t.models},
                     {"ratings", t.ratings},
                     {"battle_count", t.battle_count},
                     {"converged", t.converged},
                     {"iterations", t.iterations},
                     {"flags", t.flags}};
  if (!t.processing_order.empty()) j["processing_order"] = t.processing_order;
}

void from_json(const nlohmann::json& j, RatingTable& t) {
  std::optional<Dimension> dim =
      ParseDimensionName(j.at("dimension").get<std::string>());
  if (!dim) throw Error(ErrorCode::kSchemaViolation, "unknown dimension");
  t.dimension = *dim;
  t.method = ParseRatingMethodName(j.at("method").get<std::string>());
  t.models = j.at("models").get<std::vector<std::string>>();
  t.ratings = j.at("ratings").get<std::map<std::string, double>>();
  t.battle_count = j.at("battle_count").get<std::map<std::string, int64_t>>();
  t.converged = j.value("converged", true);
  t.iterations = j.value("iterations", 0);
  t.flags = j.value("flags", std::vector<std::string>{});
  t.processing_order =
      j.value("processing_order", std::vector<std::string>{});
}

}  // namespace factarena

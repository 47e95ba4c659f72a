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

// Shared vocabulary types, the error type, and seeded randomness.

#ifndef FACTARENA_COMMON_H_
#define FACTARENA_COMMON_H_

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace factarena {

enum class ErrorCode {
  kInvalidArgument,
  kConfigError,
  kProviderUnreachable,
  kAuthError,
  kBudgetExceeded,
  kSearchUnavailable,
  kEmptyResults,
  kWikiUnavailable,
  kParseError,
  kMissingGuideline,
  kInvalidRun,
  kNoValidJudgments,
  kEmptyPanel,
  kPoolTooSmall,
  kUnknownModel,
  kNonFinite,
  kNotConverged,
  kDisconnectedGraph,
  kNoRuns,
  kDegenerateReversal,
  kLabelDriftSuspected,
  kSchemaViolation,
  kIoError,
  kCorruptLine,
  kUnmappableLabel,
  kNoEvolutionData,
  kIntegrityError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

enum class Verdict { kSupported, kRefuted };

Verdict Flip(Verdict verdict);
std::string_view VerdictName(Verdict verdict);  // "Supported" / "Refuted"
std::optional<Verdict> ParseVerdictName(std::string_view name);

enum class ClaimSource { kHover, kFeverous, kEvolved };

std::string_view ClaimSourceName(ClaimSource source);
std::optional<ClaimSource> ParseClaimSourceName(std::string_view name);

// The seven judged dimensions, in leaderboard column order.
enum class Dimension {
  kClaimExtraction = 0,
  kEvidenceRetrieval,
  kHelpfulness,
  kInformativeness,
  kSoundness,
  kReadability,
  kOverall,
};
inline constexpr int kNumDimensions = 7;
inline constexpr std::array<Dimension, kNumDimensions> kAllDimensions = {
    Dimension::kClaimExtraction, Dimension::kEvidenceRetrieval,
    Dimension::kHelpfulness,     Dimension::kInformativeness,
    Dimension::kSoundness,       Dimension::kReadability,
    Dimension::kOverall};

std::string_view DimensionName(Dimension dim);   // "ClaimExtraction"
std::string_view DimensionLabel(Dimension dim);  // "Claim Extraction"
std::string_view DimensionShortKey(Dimension dim);  // "CE"
std::optional<Dimension> ParseDimensionName(std::string_view name);

// Canonical (de-biased) battle outcome for one dimension.
enum class Outcome { kA, kB, kTie };

std::string_view OutcomeName(Outcome outcome);  // "A" / "B" / "Tie"
std::optional<Outcome> ParseOutcomeName(std::string_view name);
// S(a, b) for side A: 1, 0 or 0.5.
double ScoreForA(Outcome outcome);

using DimensionOutcomes = std::array<Outcome, kNumDimensions>;

// A model reachable through the gateway.
struct ModelSpec {
  std::string id;
  std::string provider;
  std::string family;

  bool operator==(const ModelSpec&) const = default;
};

// Deterministic random source. The engine is std::mt19937_64 (fully
// specified by the standard); the distributions below are written out so
// sequences are identical across standard library implementations.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed) {}

  uint64_t Next() { return engine_(); }
  // Uniform integer in [0, n). n must be positive.
  uint64_t UniformInt(uint64_t n);
  // Uniform double in [0, 1) with 53 random bits.
  double Uniform01();
  bool Bernoulli(double p) { return Uniform01() < p; }

  template <typename T>
  void Shuffle(std::span<T> items) {
    for (size_t i = items.size(); i > 1; --i) {
      size_t j = UniformInt(i);
      std::swap(items[i - 1], items[j]);
    }
  }
  template <typename T>
  void Shuffle(std::vector<T>& items) {
    Shuffle(std::span<T>(items));
  }

 private:
  std::mt19937_64 engine_;
};

// Mixes a base seed with a textual tag so that independent sub-streams
// (per claim, per battle, per judge) do not depend on processing order.
uint64_t DeriveSeed(uint64_t seed, std::string_view tag);

}  // namespace factarena

#endif  // FACTARENA_COMMON_H_

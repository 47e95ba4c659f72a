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

#include "factarena/common.h"

#include <algorithm>
#include <cctype>

#include "factarena/hash.h"

namespace factarena {
namespace {

bool EqualsIgnoreCase(std::string_view a, std::string_view b) {
  return a.size() == b.size() &&
         std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

}  // namespace

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kProviderUnreachable: return "ProviderUnreachable";
    case ErrorCode::kAuthError: return "AuthError";
    case ErrorCode::kBudgetExceeded: return "BudgetExceeded";
    case ErrorCode::kSearchUnavailable: return "SearchUnavailable";
    case ErrorCode::kEmptyResults: return "EmptyResults";
    case ErrorCode::kWikiUnavailable: return "WikiUnavailable";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kMissingGuideline: return "MissingGuideline";
    case ErrorCode::kInvalidRun: return "InvalidRun";
    case ErrorCode::kNoValidJudgments: return "NoValidJudgments";
    case ErrorCode::kEmptyPanel: return "EmptyPanel";
    case ErrorCode::kPoolTooSmall: return "PoolTooSmall";
    case ErrorCode::kUnknownModel: return "UnknownModel";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotConverged: return "NotConverged";
    case ErrorCode::kDisconnectedGraph: return "DisconnectedGraph";
    case ErrorCode::kNoRuns: return "NoRuns";
    case ErrorCode::kDegenerateReversal: return "DegenerateReversal";
    case ErrorCode::kLabelDriftSuspected: return "LabelDriftSuspected";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kCorruptLine: return "CorruptLine";
    case ErrorCode::kUnmappableLabel: return "UnmappableLabel";
    case ErrorCode::kNoEvolutionData: return "NoEvolutionData";
    case ErrorCode::kIntegrityError: return "IntegrityError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code) {}

Verdict Flip(Verdict verdict) {
  return verdict == Verdict::kSupported ? Verdict::kRefuted
                                        : Verdict::kSupported;
}

std::string_view VerdictName(Verdict verdict) {
  return verdict == Verdict::kSupported ? "Supported" : "Refuted";
}

std::optional<Verdict> ParseVerdictName(std::string_view name) {
  if (EqualsIgnoreCase(name, "Supported")) return Verdict::kSupported;
  if (EqualsIgnoreCase(name, "Refuted")) return Verdict::kRefuted;
  return std::nullopt;
}

std::string_view ClaimSourceName(ClaimSource source) {
  switch (source) {
    case ClaimSource::kHover: return "HOVER";
    case ClaimSource::kFeverous: return "FEVEROUS";
    case ClaimSource::kEvolved: return "evolved";
  }
  return "";
}

std::optional<ClaimSource> ParseClaimSourceName(std::string_view name) {
  if (EqualsIgnoreCase(name, "HOVER")) return ClaimSource::kHover;
  if (EqualsIgnoreCase(name, "FEVEROUS")) return ClaimSource::kFeverous;
  if (EqualsIgnoreCase(name, "evolved")) return ClaimSource::kEvolved;
  return std::nullopt;
}

std::string_view DimensionName(Dimension dim) {
  switch (dim) {
    case Dimension::kClaimExtraction: return "ClaimExtraction";
    case Dimension::kEvidenceRetrieval: return "EvidenceRetrieval";
    case Dimension::kHelpfulness: return "Helpfulness";
    case Dimension::kInformativeness: return "Informativeness";
    case Dimension::kSoundness: return "Soundness";
    case Dimension::kReadability: return "Readability";
    case Dimension::kOverall: return "Overall";
  }
  return "";
}

std::string_view DimensionLabel(Dimension dim) {
  switch (dim) {
    case Dimension::kClaimExtraction: return "Claim Extraction";
    case Dimension::kEvidenceRetrieval: return "Evidence Retrieval";
    case Dimension::kHelpfulness: return "Justification-Helpfulness";
    case Dimension::kInformativeness: return "Justification-Informativeness";
    case Dimension::kSoundness: return "Justification-Soundness";
    case Dimension::kReadability: return "Justification-Readability";
    case Dimension::kOverall: return "Overall Judge";
  }
  return "";
}

std::string_view DimensionShortKey(Dimension dim) {
  switch (dim) {
    case Dimension::kClaimExtraction: return "CE";
    case Dimension::kEvidenceRetrieval: return "ER";
    case Dimension::kHelpfulness: return "H";
    case Dimension::kInformativeness: return "I";
    case Dimension::kSoundness: return "S";
    case Dimension::kReadability: return "R";
    case Dimension::kOverall: return "OV";
  }
  return "";
}

std::optional<Dimension> ParseDimensionName(std::string_view name) {
  for (Dimension dim : kAllDimensions) {
    if (EqualsIgnoreCase(name, DimensionName(dim))) return dim;
  }
  return std::nullopt;
}

std::string_view OutcomeName(Outcome outcome) {
  switch (outcome) {
    case Outcome::kA: return "A";
    case Outcome::kB: return "B";
    case Outcome::kTie: return "Tie";
  }
  return "";
}

std::optional<Outcome> ParseOutcomeName(std::string_view name) {
  if (EqualsIgnoreCase(name, "A")) return Outcome::kA;
  if (EqualsIgnoreCase(name, "B")) return Outcome::kB;
  if (EqualsIgnoreCase(name, "Tie")) return Outcome::kTie;
  return std::nullopt;
}

double ScoreForA(Outcome outcome) {
  switch (outcome) {
    case Outcome::kA: return 1.0;
    case Outcome::kB: return 0.0;
    case Outcome::kTie: return 0.5;
  }
  return 0.5;
}

uint64_t Rng::UniformInt(uint64_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "UniformInt(0)");
  // Rejection sampling on the largest multiple of n.
  const uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::Uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

uint64_t DeriveSeed(uint64_t seed, std::string_view tag) {
  // splitmix64 finalizer over the tag hash xor seed.
  uint64_t z = Fnv1a64(tag) ^ (seed + 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace factarena

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

// The three-stage fact-checking pipeline a target model is driven through:
// claim extraction, evidence retrieval, then justification and verdict.

#ifndef FACTARENA_PIPELINE_H_
#define FACTARENA_PIPELINE_H_

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "factarena/common.h"
#include "factarena/gateway.h"
#include "factarena/templates.h"
#include "json.hpp"

namespace factarena {

enum class LineageKind { kReversed, kEvolved };

std::string_view LineageKindName(LineageKind kind);

struct ClaimLineage {
  std::string parent_id;
  int round = 0;
  LineageKind kind = LineageKind::kReversed;
};

struct Claim {
  std::string claim_id;
  std::string text;
  Verdict gold_verdict = Verdict::kSupported;
  ClaimSource source = ClaimSource::kHover;
  std::optional<ClaimLineage> lineage;

  // Non-empty text; round 0 iff reversed; evolved claims carry a parent.
  void Validate() const;
};

struct SubClaimSet {
  std::string claim_id;
  std::vector<std::string> sub_claims;

  int count() const { return static_cast<int>(sub_claims.size()); }
};

struct Evidence {
  std::string claim_id;
  std::vector<std::string> items;
  std::vector<SearchResult> web_context;
  // Search failed or returned nothing; the model worked without web context.
  bool degraded = false;
};

struct VerificationOutput {
  std::string justification;
  Verdict verdict = Verdict::kSupported;
};

struct StageTiming {
  int64_t extract_ms = 0;
  int64_t evidence_ms = 0;
  int64_t verify_ms = 0;
};

struct PipelineRun {
  std::string run_id;
  std::string claim_id;
  std::string model_id;
  SubClaimSet sub_claims;
  Evidence evidence;
  VerificationOutput verification;
  bool correct = false;
  // False for an InvalidRun: some stage failed; `error` says which.
  bool valid = true;
  std::string error;
  StageTiming timing;
};

// "run/<model>/<claim>"; stable so resumed runs can be detected.
std::string MakeRunId(const std::string& model_id, const std::string& claim_id);

void to_json(nlohmann::json& j, const Claim& c);
void from_json(const nlohmann::json& j, Claim& c);
void to_json(nlohmann::json& j, const SubClaimSet& s);
void from_json(const nlohmann::json& j, SubClaimSet& s);
void to_json(nlohmann::json& j, const PipelineRun& r);
void from_json(const nlohmann::json& j, PipelineRun& r);

// Output parsers, exposed for tests and for the judge/evolver modules.
std::optional<std::vector<std::string>> ParseSubClaims(const std::string& text);
std::optional<std::vector<std::string>> ParseEvidenceItems(
    const std::string& text);
// Finds the last "VERDICT: SUPPORTED|REFUTED" marker (case-insensitive).
std::optional<VerificationOutput> ParseVerification(const std::string& text);

std::string FormatWebContext(const std::vector<SearchResult>& results);
std::string FormatEvidence(const Evidence& evidence);

struct PipelineOptions {
  int top_k = 1;
  // When false, a search outage makes the run invalid instead of degraded.
  bool tolerate_degraded = true;
  int max_reprompts = 2;
};

class FactCheckPipeline {
 public:
  // `timing_clock` measures per-stage latency; without one timings are 0,
  // which keeps replayed records byte-identical.
  FactCheckPipeline(Gateway& gateway, Templates templates,
                    PipelineOptions options = {},
                    std::shared_ptr<Clock> timing_clock = nullptr);

  SubClaimSet ExtractClaims(const ModelSpec& model, const Claim& claim);
  Evidence RetrieveEvidence(const ModelSpec& model, const Claim& claim,
                            const SubClaimSet& sub_claims);
  VerificationOutput Verify(const ModelSpec& model, const Claim& claim,
                            const SubClaimSet& sub_claims,
                            const Evidence& evidence);

  // Runs the stages strictly in order. Stage failures (parse errors, an
  // untolerated search outage) yield a record with valid = false; provider
  // and budget failures propagate.
  PipelineRun RunPipeline(const ModelSpec& model, const Claim& claim);

  const PipelineOptions& options() const { return options_; }

 private:
  int64_t ElapsedMs(Clock::TimePoint start) const;
  Clock::TimePoint Start() const;

  Gateway& gateway_;
  Templates templates_;
  PipelineOptions options_;
  std::shared_ptr<Clock> timing_clock_;
};

}  // namespace factarena

#endif  // FACTARENA_PIPELINE_H_

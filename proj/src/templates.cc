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

#include "factarena/templates.h"

#include <fstream>
#include <sstream>

#include "factarena/common.h"

namespace factarena {
namespace {

constexpr char kExtract[] =
    R"(You are a fact-checking assistant. Break the complex claim below into
the smallest set of independent sub-claims that can each be checked on its
own. Keep names, dates and quantities exactly as stated. Do not add facts
that the claim does not assert.

Claim: {claim}

Answer with a numbered list, one sub-claim per item:
1. <sub-claim>
2. <sub-claim>
)";

constexpr char kEvidence[] =
    R"(You are a fact-checking assistant collecting evidence.

Claim: {claim}

Sub-claims:
{sub_claims}

Web search result:
{web_context}

Using the search result and what you reliably know, list the key facts that
bear on whether each sub-claim is true or false. Write one fact per line,
each starting with "- ".
)";

constexpr char kVerify[] =
    R"(You are a fact-checking assistant deciding a verdict.

Claim: {claim}

Sub-claims:
{sub_claims}

Evidence:
{evidence}

Reason step by step over the sub-claims using the evidence, then give the
final verdict for the whole claim. The claim is SUPPORTED only if every
sub-claim holds; otherwise it is REFUTED. End your answer with exactly one
line of the form:
VERDICT: SUPPORTED
or
VERDICT: REFUTED
)";

constexpr char kConsolidate[] =
    R"(You maintain a reference decomposition used to grade how well systems
break a claim into sub-claims.

Claim: {claim}

Current reference decomposition:
{guideline}

Another candidate decomposition (source hidden):
{sub_claims}

Merge the candidate into the reference: keep every sub-claim that is
atomic, verifiable and faithful to the claim, drop duplicates and
hallucinated content, and split compound items. Reply with
GUIDELINE:
followed by the updated numbered list.
)";

constexpr char kEntities[] =
    R"(List the named entities (people, places, organisations, works, events)
mentioned in the claim below that have their own encyclopedia article.

Claim: {claim}

Reply with one entity per line, each starting with "- ". Reply NONE if
there are no such entities.
)";

constexpr char kJudge[] =
    R"(You are an impartial judge comparing two anonymous assistants that each
fact-checked the same claim in three stages: claim extraction, evidence
retrieval, and justification with a verdict. Ignore the order in which the
assistants are shown and ignore answer length.

Claim: {claim}

Reference decomposition for claim extraction:
{guideline_extraction}

Reference encyclopedia text for evidence retrieval (a factual basis, not a
gold answer):
{guideline_evidence}

Criteria for the justification:
{rubric}

[Assistant 1]
{assistant_1_block}

[Assistant 2]
{assistant_2_block}

Explain your reasoning briefly after "RATIONALE:", then finish with one
line giving the better assistant per dimension (1, 2 or tie):
CE:<1|2|tie> ER:<1|2|tie> H:<1|2|tie> I:<1|2|tie> S:<1|2|tie> R:<1|2|tie> OV:<1|2|tie>
CE = claim extraction, ER = evidence retrieval, H = helpfulness,
I = informativeness, S = soundness, R = readability, OV = overall.
)";

constexpr char kReverse[] =
    R"(Rewrite the claim below so that its truth value is reversed (its current
verdict is {verdict}). The new claim must be a coherent, checkable
statement about the same subject and must not be a trivial negation or a
cosmetic edit.

Claim: {claim}

Reply with one line:
CLAIM: <reversed claim>
)";

constexpr char kEvolve[] =
    R"(You design harder fact-checking test cases. The claim below (verdict:
{verdict}) was answered correctly by every system. Study how they answered
and where the judges found them weak, then rewrite the claim so that it
keeps the same meaning and the same verdict but probes those weaknesses
(for example by adding multi-hop reasoning, indirect references, or
distracting but true context).

Claim: {claim}

System answers:
{model_answers}

Judge observations:
{judge_rationales}

Reply with one line:
CLAIM: <harder claim>
If you cannot keep the verdict unchanged, add a line LABEL_DRIFT: yes
)";

constexpr char kRubric[] =
    R"(Helpfulness: the reasoning is consistent with the verdict it reaches and does not mislead.
Informativeness: the reasoning uses all the salient facts from the evidence that decide the claim.
Soundness: each inference is valid, the argument hangs together, and it is backed by the evidence.
Readability: the reasoning is clear, grammatical and easy to follow.)";

}  // namespace

Templates Templates::Defaults() {
  return Templates{kExtract, kEvidence, kVerify, kConsolidate, kEntities,
                   kJudge,   kReverse,  kEvolve, kRubric};
}

const std::vector<std::string>& TemplateNames() {
  static const std::vector<std::string> kNames = {
      "extract", "evidence", "verify",  "consolidate", "entities",
      "judge",   "reverse",  "evolve",  "rubric"};
  return kNames;
}

namespace {

std::string* Field(Templates& t, const std::string& name) {
  if (name == "extract") return &t.extract;
  if (name == "evidence") return &t.evidence;
  if (name == "verify") return &t.verify;
  if (name == "consolidate") return &t.consolidate;
  if (name == "entities") return &t.entities;
  if (name == "judge") return &t.judge;
  if (name == "reverse") return &t.reverse;
  if (name == "evolve") return &t.evolve;
  if (name == "rubric") return &t.rubric;
  return nullptr;
}

}  // namespace

Templates LoadTemplates(const std::filesystem::path& dir) {
  Templates t = Templates::Defaults();
  if (dir.empty()) return t;
  for (const std::string& name : TemplateNames()) {
    std::filesystem::path path = dir / (name + ".txt");
    std::ifstream in(path);
    if (!in) continue;
    std::stringstream buffer;
    buffer << in.rdbuf();
    *Field(t, name) = buffer.str();
  }
  return t;
}

void WriteDefaultTemplates(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  Templates t = Templates::Defaults();
  for (const std::string& name : TemplateNames()) {
    std::ofstream out(dir / (name + ".txt"), std::ios::trunc);
    out << *Field(t, name);
    if (!out) {
      throw Error(ErrorCode::kIoError,
                  "cannot write template " + (dir / name).string());
    }
  }
}

}  // namespace factarena

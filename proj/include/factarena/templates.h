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

#ifndef FACTARENA_TEMPLATES_H_
#define FACTARENA_TEMPLATES_H_

#include <filesystem>
#include <string>
#include <vector>

namespace factarena {

// Prompt templates with named "{placeholder}" slots. Each field corresponds
// to templates/<name>.txt.
struct Templates {
  std::string extract;      // {claim}
  std::string evidence;     // {claim} {sub_claims} {web_context}
  std::string verify;       // {claim} {sub_claims} {evidence}
  std::string consolidate;  // {claim} {guideline} {sub_claims}
  std::string entities;     // {claim}
  std::string judge;        // {claim} {guideline_extraction}
                            // {guideline_evidence} {rubric}
                            // {assistant_1_block} {assistant_2_block}
  std::string reverse;      // {claim} {verdict}
  std::string evolve;       // {claim} {verdict} {model_answers}
                            // {judge_rationales}
  std::string rubric;       // rendered criteria, one per line

  static Templates Defaults();
};

// Names in file order: extract, evidence, verify, consolidate, entities,
// judge, reverse, evolve, rubric.
const std::vector<std::string>& TemplateNames();

// Starts from the defaults and overrides every template whose
// <dir>/<name>.txt exists. An empty `dir` yields the defaults.
Templates LoadTemplates(const std::filesystem::path& dir);

// Writes the default templates into `dir` (creating it).
void WriteDefaultTemplates(const std::filesystem::path& dir);

}  // namespace factarena

#endif  // FACTARENA_TEMPLATES_H_

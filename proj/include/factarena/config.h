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

// Run configuration: a JSON file describing the model pool, judge panel,
// backends and tuning knobs. Every validation failure is a kConfigError
// naming the offending key.

#ifndef FACTARENA_CONFIG_H_
#define FACTARENA_CONFIG_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "factarena/common.h"
#include "factarena/gateway.h"
#include "factarena/guidelines.h"
#include "factarena/judgment.h"
#include "factarena/pipeline.h"
#include "factarena/rating.h"
#include "factarena/storage.h"
#include "json.hpp"

namespace factarena {

struct ProviderConfig {
  std::string id;
  std::string kind;  // "http" or "scripted"
  // Scripted providers.
  std::map<std::string, std::string> script;
  std::string default_response;
};

struct SearchConfig {
  std::string kind = "none";  // "none", "http" or "scripted"
  std::map<std::string, std::vector<SearchResult>> fixtures;
  std::vector<SearchResult> default_results;
  bool available = true;
};

struct WikiConfig {
  std::string kind = "none";  // "none", "http" or "scripted"
  std::string base_url = "https://en.wikipedia.org/api/rest_v1";
  std::map<std::string, std::string> pages;
  bool available = true;
};

struct DatasetConfig {
  std::filesystem::path path;
  DatasetFormat format = DatasetFormat::kJsonl;
  int64_t limit = -1;
};

struct RunConfig {
  std::string run_name = "factarena";
  uint64_t seed = 0;
  std::filesystem::path pool_path;
  std::filesystem::path reports_dir;
  std::filesystem::path template_dir;  // empty: built-in templates

  std::vector<ProviderConfig> providers;
  std::vector<ModelSpec> models;
  std::vector<ModelSpec> judges;
  std::optional<ModelSpec> evolver;
  bool allow_evolver_in_pool = false;

  int sample_size = 2;
  int quorum = kDefaultQuorum;
  int max_rounds = 3;
  bool exclude_self_family = false;
  bool per_judge_votes = false;
  MissingGuidelinePolicy missing_guideline = MissingGuidelinePolicy::kAbort;
  int parallel = 8;

  RatingConfig rating;
  RatingMethod leaderboard_method = RatingMethod::kBradleyTerry;
  GatewayOptions gateway;
  PipelineOptions pipeline;
  ConsolidationOptions consolidation;
  SearchConfig search;
  WikiConfig wiki;
  std::vector<DatasetConfig> datasets;

  // The file as read, for the manifest.
  nlohmann::json raw;

  // Re-checks cross-field invariants (after command-line overrides).
  void Validate() const;
  // Digest over the keys that define what a pool contains.
  std::string Digest() const;
};

// Relative paths are resolved against `base_dir`.
RunConfig ParseRunConfig(const nlohmann::json& j,
                         const std::filesystem::path& base_dir);
RunConfig LoadRunConfig(const std::filesystem::path& path);

}  // namespace factarena

#endif  // FACTARENA_CONFIG_H_

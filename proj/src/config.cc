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

#include "factarena/config.h"

#include <set>

#include "factarena/hash.h"
#include "factarena/storage.h"

namespace factarena {

using json = nlohmann::json;

namespace {

[[noreturn]] void Fail(const std::string& key, const std::string& message) {
  throw Error(ErrorCode::kConfigError, "'" + key + "' " + message);
}

void CheckKeys(const json& j, const std::string& where,
               const std::set<std::string>& allowed) {
  if (!j.is_object()) Fail(where, "must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) {
      Fail(where.empty() ? key : where + "." + key, "is not a recognised key");
    }
  }
}

template <typename T>
T Read(const json& j, const std::string& key, const std::string& where,
       T fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    Fail(where.empty() ? key : where + "." + key, "has the wrong type");
  }
}

std::filesystem::path Resolve(const std::filesystem::path& base,
                              const std::string& value) {
  if (value.empty()) return {};
  std::filesystem::path p(value);
  return p.is_absolute() ? p : base / p;
}

ModelSpec ReadModel(const json& j, const std::string& where) {
  CheckKeys(j, where, {"id", "provider", "family"});
  ModelSpec spec;
  spec.id = Read<std::string>(j, "id", where, "");
  spec.provider = Read<std::string>(j, "provider", where, "");
  spec.family = Read<std::string>(j, "family", where, "");
  if (spec.id.empty()) Fail(where + ".id", "must be a non-empty string");
  if (spec.provider.empty()) Fail(where + ".provider", "must be set");
  if (spec.family.empty()) spec.family = spec.id;
  return spec;
}

std::vector<SearchResult> ReadResults(const json& j, const std::string& where) {
  if (!j.is_array()) Fail(where, "must be an array of results");
  std::vector<SearchResult> results;
  int rank = 0;
  for (const json& item : j) {
    SearchResult r;
    r.rank = Read<int>(item, "rank", where, ++rank);
    r.title = Read<std::string>(item, "title", where, "");
    r.snippet = Read<std::string>(item, "snippet", where, "");
    r.url = Read<std::string>(item, "url", where, "");
    results.push_back(std::move(r));
  }
  return results;
}

}  // namespace

void RunConfig::Validate() const {
  if (models.empty()) Fail("models", "must list at least one model");
  std::set<std::string> provider_ids;
  for (const ProviderConfig& p : providers) provider_ids.insert(p.id);
  std::set<std::string> ids;
  for (const ModelSpec& m : models) {
    if (!ids.insert(m.id).second) Fail("models", "repeats id '" + m.id + "'");
    if (!provider_ids.count(m.provider)) {
      Fail("models", "model '" + m.id + "' uses unknown provider '" +
                         m.provider + "'");
    }
  }
  if (judges.empty()) Fail("judges", "must list at least one judge");
  std::set<std::string> judge_ids;
  for (const ModelSpec& j : judges) {
    if (!judge_ids.insert(j.id).second) {
      Fail("judges", "repeats id '" + j.id + "'");
    }
    if (!provider_ids.count(j.provider)) {
      Fail("judges", "judge '" + j.id + "' uses unknown provider '" +
                         j.provider + "'");
    }
  }
  if (judges.size() >= models.size()) {
    Fail("judges", "panel size must be smaller than the model pool");
  }
  if (sample_size < 2) Fail("sample_size", "must be at least 2");
  if (static_cast<size_t>(sample_size) > models.size()) {
    Fail("sample_size", "exceeds the model pool size");
  }
  if (quorum < 1) Fail("quorum", "must be positive");
  if (max_rounds < 0) Fail("max_rounds", "must be non-negative");
  if (parallel < 1) Fail("parallel", "must be positive");
  if (evolver) {
    if (!provider_ids.count(evolver->provider)) {
      Fail("evolver", "uses unknown provider '" + evolver->provider + "'");
    }
    if (!allow_evolver_in_pool && ids.count(evolver->id)) {
      Fail("evolver", "is also a target model; set allow_evolver_in_pool");
    }
  }
  try {
    rating.Validate();
  } catch (const Error& e) {
    Fail("rating", e.what());
  }
  if (pool_path.empty()) Fail("pool", "must be set");
}

std::string RunConfig::Digest() const {
  json models_json = json::array(), judges_json = json::array();
  for (const ModelSpec& m : models) {
    models_json.push_back({m.id, m.provider, m.family});
  }
  for (const ModelSpec& m : judges) {
    judges_json.push_back({m.id, m.provider, m.family});
  }
  json basis{{"seed", seed},
             {"models", models_json},
             {"judges", judges_json},
             {"evolver", evolver ? evolver->id : ""},
             {"sample_size", sample_size},
             {"quorum", quorum},
             {"max_rounds", max_rounds},
             {"exclude_self_family", exclude_self_family}};
  return Sha256Hex(basis.dump());
}

RunConfig ParseRunConfig(const json& j, const std::filesystem::path& base_dir) {
  CheckKeys(j, "",
            {"run_name", "seed", "pool", "reports_dir", "template_dir",
             "providers", "models", "judges", "evolver",
             "allow_evolver_in_pool", "sample_size", "quorum", "max_rounds",
             "exclude_self_family", "per_judge_votes", "missing_guideline",
             "parallel", "rating", "gateway", "pipeline", "consolidation",
             "search", "wiki", "datasets"});
  RunConfig cfg;
  cfg.raw = j;
  cfg.run_name = Read<std::string>(j, "run_name", "", cfg.run_name);
  if (!j.contains("seed") || !j.at("seed").is_number_unsigned()) {
    Fail("seed", "is required and must be a non-negative integer");
  }
  cfg.seed = j.at("seed").get<uint64_t>();
  cfg.pool_path = Resolve(base_dir, Read<std::string>(j, "pool", "", "pool.jsonl"));
  cfg.reports_dir =
      Resolve(base_dir, Read<std::string>(j, "reports_dir", "", "reports"));
  cfg.template_dir =
      Resolve(base_dir, Read<std::string>(j, "template_dir", "", ""));

  if (!j.contains("providers") || !j.at("providers").is_object()) {
    Fail("providers", "is required and must be an object");
  }
  for (const auto& [id, p] : j.at("providers").items()) {
    std::string where = "providers." + id;
    CheckKeys(p, where, {"kind", "script", "default_response"});
    ProviderConfig provider;
    provider.id = id;
    provider.kind = Read<std::string>(p, "kind", where, "");
    if (provider.kind != "http" && provider.kind != "scripted") {
      Fail(where + ".kind", "must be \"http\" or \"scripted\"");
    }
    provider.script = Read<std::map<std::string, std::string>>(
        p, "script", where, {});
    provider.default_response =
        Read<std::string>(p, "default_response", where, "");
    cfg.providers.push_back(std::move(provider));
  }

  auto read_models = [&](const char* key) {
    std::vector<ModelSpec> specs;
    if (!j.contains(key) || !j.at(key).is_array()) {
      Fail(key, "is required and must be an array");
    }
    int index = 0;
    for (const json& m : j.at(key)) {
      specs.push_back(
          ReadModel(m, std::string(key) + "[" + std::to_string(index++) + "]"));
    }
    return specs;
  };
  cfg.models = read_models("models");
  cfg.judges = read_models("judges");
  if (j.contains("evolver") && !j.at("evolver").is_null()) {
    cfg.evolver = ReadModel(j.at("evolver"), "evolver");
  }
  cfg.allow_evolver_in_pool = Read<bool>(j, "allow_evolver_in_pool", "", false);
  cfg.sample_size = Read<int>(j, "sample_size", "", 0);
  if (cfg.sample_size == 0) cfg.sample_size = static_cast<int>(cfg.models.size());
  cfg.quorum = Read<int>(j, "quorum", "", cfg.quorum);
  cfg.max_rounds = Read<int>(j, "max_rounds", "", cfg.max_rounds);
  cfg.exclude_self_family = Read<bool>(j, "exclude_self_family", "", false);
  cfg.per_judge_votes = Read<bool>(j, "per_judge_votes", "", false);
  std::string missing = Read<std::string>(j, "missing_guideline", "", "abort");
  if (missing == "abort") {
    cfg.missing_guideline = MissingGuidelinePolicy::kAbort;
  } else if (missing == "flag") {
    cfg.missing_guideline = MissingGuidelinePolicy::kProceedFlagged;
  } else {
    Fail("missing_guideline", "must be \"abort\" or \"flag\"");
  }
  cfg.parallel = Read<int>(j, "parallel", "", cfg.parallel);

  if (j.contains("rating")) {
    const json& r = j.at("rating");
    CheckKeys(r, "rating",
              {"alpha", "k_factor", "initial_rating", "center", "bt_tolerance",
               "bt_max_iters", "prior_strength", "method"});
    RatingConfig& rc = cfg.rating;
    rc.alpha = Read<double>(r, "alpha", "rating", rc.alpha);
    rc.k_factor = Read<double>(r, "k_factor", "rating", rc.k_factor);
    rc.initial_rating =
        Read<double>(r, "initial_rating", "rating", rc.initial_rating);
    rc.center = Read<double>(r, "center", "rating", rc.center);
    rc.bt_tolerance = Read<double>(r, "bt_tolerance", "rating", rc.bt_tolerance);
    rc.bt_max_iters = Read<int>(r, "bt_max_iters", "rating", rc.bt_max_iters);
    rc.prior_strength =
        Read<double>(r, "prior_strength", "rating", rc.prior_strength);
    std::string method = Read<std::string>(r, "method", "rating", "BradleyTerry");
    try {
      cfg.leaderboard_method = ParseRatingMethodName(method);
    } catch (const Error&) {
      Fail("rating.method", "must be \"BradleyTerry\" or \"Elo\"");
    }
  }

  if (j.contains("gateway")) {
    const json& g = j.at("gateway");
    CheckKeys(g, "gateway",
              {"cache_enabled", "cache_dir", "max_retries", "backoff_base_ms",
               "call_budget", "requests_per_second"});
    cfg.gateway.cache_enabled = Read<bool>(g, "cache_enabled", "gateway", true);
    cfg.gateway.cache_dir =
        Resolve(base_dir, Read<std::string>(g, "cache_dir", "gateway", ""));
    cfg.gateway.max_retries = Read<int>(g, "max_retries", "gateway", 2);
    cfg.gateway.backoff_base = std::chrono::milliseconds(
        Read<int64_t>(g, "backoff_base_ms", "gateway", 1000));
    cfg.gateway.call_budget = Read<int64_t>(g, "call_budget", "gateway", 0);
    cfg.gateway.requests_per_second =
        Read<double>(g, "requests_per_second", "gateway", 0.0);
    if (cfg.gateway.max_retries < 0) {
      Fail("gateway.max_retries", "must be non-negative");
    }
  } else {
    cfg.gateway.cache_enabled = true;
  }

  if (j.contains("pipeline")) {
    const json& p = j.at("pipeline");
    CheckKeys(p, "pipeline", {"top_k", "tolerate_degraded", "max_reprompts"});
    cfg.pipeline.top_k = Read<int>(p, "top_k", "pipeline", cfg.pipeline.top_k);
    cfg.pipeline.tolerate_degraded = Read<bool>(
        p, "tolerate_degraded", "pipeline", cfg.pipeline.tolerate_degraded);
    cfg.pipeline.max_reprompts =
        Read<int>(p, "max_reprompts", "pipeline", cfg.pipeline.max_reprompts);
    if (cfg.pipeline.top_k < 1) Fail("pipeline.top_k", "must be positive");
  }

  if (j.contains("consolidation")) {
    const json& c = j.at("consolidation");
    CheckKeys(c, "consolidation", {"max_rounds", "early_stop_at_six"});
    if (c.contains("max_rounds") && !c.at("max_rounds").is_null()) {
      cfg.consolidation.max_rounds =
          Read<int>(c, "max_rounds", "consolidation", 0);
    }
    cfg.consolidation.early_stop_at_six =
        Read<bool>(c, "early_stop_at_six", "consolidation", false);
  }

  if (j.contains("search")) {
    const json& s = j.at("search");
    CheckKeys(s, "search", {"kind", "fixtures", "default_results", "available"});
    cfg.search.kind = Read<std::string>(s, "kind", "search", "none");
    if (cfg.search.kind != "none" && cfg.search.kind != "http" &&
        cfg.search.kind != "scripted") {
      Fail("search.kind", "must be \"none\", \"http\" or \"scripted\"");
    }
    if (s.contains("fixtures")) {
      if (!s.at("fixtures").is_object()) {
        Fail("search.fixtures", "must be an object");
      }
      for (const auto& [query, results] : s.at("fixtures").items()) {
        cfg.search.fixtures[query] =
            ReadResults(results, "search.fixtures." + query);
      }
    }
    if (s.contains("default_results")) {
      cfg.search.default_results =
          ReadResults(s.at("default_results"), "search.default_results");
    }
    cfg.search.available = Read<bool>(s, "available", "search", true);
  }

  if (j.contains("wiki")) {
    const json& w = j.at("wiki");
    CheckKeys(w, "wiki", {"kind", "base_url", "pages", "available"});
    cfg.wiki.kind = Read<std::string>(w, "kind", "wiki", "none");
    if (cfg.wiki.kind != "none" && cfg.wiki.kind != "http" &&
        cfg.wiki.kind != "scripted") {
      Fail("wiki.kind", "must be \"none\", \"http\" or \"scripted\"");
    }
    cfg.wiki.base_url = Read<std::string>(w, "base_url", "wiki", cfg.wiki.base_url);
    cfg.wiki.pages =
        Read<std::map<std::string, std::string>>(w, "pages", "wiki", {});
    cfg.wiki.available = Read<bool>(w, "available", "wiki", true);
  }

  if (j.contains("datasets")) {
    if (!j.at("datasets").is_array()) Fail("datasets", "must be an array");
    int index = 0;
    for (const json& d : j.at("datasets")) {
      std::string where = "datasets[" + std::to_string(index++) + "]";
      CheckKeys(d, where, {"path", "format", "limit"});
      DatasetConfig dataset;
      dataset.path = Resolve(base_dir, Read<std::string>(d, "path", where, ""));
      if (dataset.path.empty()) Fail(where + ".path", "must be set");
      try {
        dataset.format =
            ParseDatasetFormat(Read<std::string>(d, "format", where, "jsonl"));
      } catch (const Error&) {
        Fail(where + ".format", "must be hover, feverous or jsonl");
      }
      dataset.limit = Read<int64_t>(d, "limit", where, -1);
      cfg.datasets.push_back(std::move(dataset));
    }
  }
  cfg.Validate();
  return cfg;
}

RunConfig LoadRunConfig(const std::filesystem::path& path) {
  std::string contents;
  try {
    contents = ReadFile(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfigError, "'config' " + std::string(e.what()));
  }
  json j;
  try {
    j = json::parse(contents);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                "'config' is not valid JSON: " + std::string(e.what()));
  }
  return ParseRunConfig(j, path.parent_path().empty()
                               ? std::filesystem::current_path()
                               : path.parent_path());
}

}  // namespace factarena

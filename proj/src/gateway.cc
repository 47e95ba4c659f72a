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

#include "factarena/gateway.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include "factarena/hash.h"
#include "factarena/text.h"

namespace factarena {

using nlohmann::json;

std::string_view RoleName(Role role) {
  switch (role) {
    case Role::kSystem: return "system";
    case Role::kUser: return "user";
    case Role::kAssistant: return "assistant";
  }
  return "";
}

void ChatRequest::Validate() const {
  if (messages.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "chat request has no messages");
  }
  if (max_tokens <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_tokens must be positive");
  }
  size_t i = messages[0].role == Role::kSystem ? 1 : 0;
  if (i == messages.size()) {
    throw Error(ErrorCode::kInvalidArgument,
                "chat request has only a system message");
  }
  Role expected = Role::kUser;
  for (; i < messages.size(); ++i) {
    if (messages[i].role != expected) {
      throw Error(ErrorCode::kInvalidArgument,
                  "message roles must alternate user/assistant at index " +
                      std::to_string(i));
    }
    expected = expected == Role::kUser ? Role::kAssistant : Role::kUser;
  }
}

std::string ChatRequest::Hash() const {
  json j;
  j["provider_id"] = provider_id;
  j["model_id"] = model_id;
  json msgs = json::array();
  for (const ChatMessage& m : messages) {
    msgs.push_back({{"role", RoleName(m.role)}, {"content", m.content}});
  }
  j["messages"] = std::move(msgs);
  j["temperature"] = temperature;
  return Sha256Hex(j.dump());
}

void to_json(json& j, const ChatRequest& r) {
  json msgs = json::array();
  for (const ChatMessage& m : r.messages) {
    msgs.push_back({{"role", RoleName(m.role)}, {"content", m.content}});
  }
  j = json{{"provider_id", r.provider_id},
           {"model_id", r.model_id},
           {"messages", std::move(msgs)},
           {"temperature", r.temperature},
           {"max_tokens", r.max_tokens}};
}

void to_json(json& j, const ChatResponse& r) {
  j = json{{"content", r.content},
           {"usage",
            {{"prompt_tokens", r.usage.prompt_tokens},
             {"completion_tokens", r.usage.completion_tokens}}}};
}

void from_json(const json& j, ChatResponse& r) {
  r.content = j.at("content").get<std::string>();
  if (j.contains("usage")) {
    r.usage.prompt_tokens = j["usage"].value("prompt_tokens", int64_t{0});
    r.usage.completion_tokens =
        j["usage"].value("completion_tokens", int64_t{0});
  }
  r.cached = false;
}

void to_json(json& j, const SearchResult& r) {
  j = json{{"rank", r.rank},
           {"title", r.title},
           {"snippet", r.snippet},
           {"url", r.url}};
}

void from_json(const json& j, SearchResult& r) {
  r.rank = j.value("rank", 1);
  r.title = j.value("title", "");
  r.snippet = j.value("snippet", "");
  r.url = j.value("url", "");
}

// ---------------------------------------------------------------------------
// Clocks and rate limiting.

Clock::TimePoint SystemClock::Now() {
  return std::chrono::time_point_cast<Duration>(
      std::chrono::steady_clock::now());
}

void SystemClock::SleepUntil(TimePoint t) { std::this_thread::sleep_until(t); }

Clock::TimePoint FakeClock::Now() {
  std::lock_guard<std::mutex> lock(mu_);
  return now_;
}

void FakeClock::SleepUntil(TimePoint t) {
  ++sleeps_;
  std::lock_guard<std::mutex> lock(mu_);
  if (t > now_) {
    slept_ += t - now_;
    now_ = t;
  }
}

void FakeClock::Advance(Duration d) {
  std::lock_guard<std::mutex> lock(mu_);
  now_ += d;
}

Clock::Duration FakeClock::total_slept() const {
  std::lock_guard<std::mutex> lock(mu_);
  return slept_;
}

RateLimiter::RateLimiter(double requests_per_second,
                         std::shared_ptr<Clock> clock)
    : interval_(std::chrono::duration_cast<Clock::Duration>(
          std::chrono::duration<double>(1.0 / requests_per_second))),
      clock_(std::move(clock)) {
  if (!(requests_per_second > 0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "requests_per_second must be positive");
  }
}

Clock::TimePoint RateLimiter::Acquire() {
  Clock::TimePoint slot;
  {
    std::lock_guard<std::mutex> lock(mu_);
    Clock::TimePoint now = clock_->Now();
    slot = next_slot_ && *next_slot_ > now ? *next_slot_ : now;
    next_slot_ = slot + interval_;
  }
  clock_->SleepUntil(slot);
  return slot;
}

// ---------------------------------------------------------------------------
// Scripted backends.

ScriptedProvider::ScriptedProvider(std::map<std::string, std::string> script,
                                   std::string default_response,
                                   Responder responder)
    : script_(std::move(script)),
      default_response_(std::move(default_response)),
      responder_(std::move(responder)) {}

ChatResponse ScriptedProvider::Complete(const ChatRequest& request) {
  {
    std::lock_guard<std::mutex> lock(mu_);
    transcript_.push_back(request);
  }
  std::vector<std::string> keys;
  const std::string& scenario = request.scenario_key;
  if (!scenario.empty()) {
    keys.push_back(request.model_id + "/" + scenario);
    keys.push_back(scenario);
  }
  keys.push_back(request.Hash().substr(0, 16));
  if (!scenario.empty()) {
    std::string stage = scenario.substr(0, scenario.find(':'));
    keys.push_back(request.model_id + "/" + stage + ":*");
    keys.push_back(stage + ":*");
  }
  std::optional<std::string> content;
  for (const std::string& key : keys) {
    auto it = script_.find(key);
    if (it != script_.end()) {
      content = it->second;
      break;
    }
  }
  if (!content && responder_) content = responder_(request);
  if (!content && !default_response_.empty()) content = default_response_;
  if (!content) {
    throw Error(ErrorCode::kProviderUnreachable,
                "scripted provider has no response for '" + scenario + "'");
  }
  ChatResponse response;
  response.content = *content;
  for (const ChatMessage& m : request.messages) {
    response.usage.prompt_tokens += static_cast<int64_t>(m.content.size() / 4);
  }
  response.usage.completion_tokens =
      static_cast<int64_t>(response.content.size() / 4);
  return response;
}

std::vector<ChatRequest> ScriptedProvider::Transcript() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transcript_;
}

size_t ScriptedProvider::call_count() const {
  std::lock_guard<std::mutex> lock(mu_);
  return transcript_.size();
}

ScriptedSearch::ScriptedSearch(
    std::map<std::string, std::vector<SearchResult>> fixtures,
    std::vector<SearchResult> default_results, bool available)
    : fixtures_(std::move(fixtures)),
      default_results_(std::move(default_results)),
      available_(available) {}

std::vector<SearchResult> ScriptedSearch::Search(const std::string& query,
                                                 int top_k) {
  if (!available_) {
    throw Error(ErrorCode::kSearchUnavailable, "scripted search is down");
  }
  auto it = fixtures_.find(query);
  std::vector<SearchResult> results =
      it != fixtures_.end() ? it->second : default_results_;
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchResult& a, const SearchResult& b) {
                     return a.rank < b.rank;
                   });
  if (static_cast<int>(results.size()) > top_k) results.resize(top_k);
  return results;
}

ScriptedWiki::ScriptedWiki(std::map<std::string, std::string> pages,
                           bool available)
    : pages_(std::move(pages)), available_(available) {}

WikiPage ScriptedWiki::Fetch(const std::string& entity) {
  if (!available_) {
    throw Error(ErrorCode::kWikiUnavailable, "scripted wiki is down");
  }
  WikiPage page;
  page.entity = entity;
  auto it = pages_.find(entity);
  if (it != pages_.end() && !it->second.empty()) {
    page.summary_text = it->second;
    page.found = true;
  }
  return page;
}

// ---------------------------------------------------------------------------
// Gateway.

Gateway::Gateway(GatewayOptions options, std::shared_ptr<Clock> clock)
    : options_(std::move(options)),
      clock_(clock ? std::move(clock) : std::make_shared<SystemClock>()) {
  if (options_.max_retries < 0) {
    throw Error(ErrorCode::kInvalidArgument, "max_retries must be >= 0");
  }
}

void Gateway::AddProvider(const std::string& provider_id,
                          std::shared_ptr<ChatProvider> provider) {
  std::lock_guard<std::mutex> lock(mu_);
  providers_[provider_id] = std::move(provider);
}

bool Gateway::HasProvider(const std::string& provider_id) const {
  std::lock_guard<std::mutex> lock(mu_);
  return providers_.contains(provider_id);
}

void Gateway::SetSearchBackend(std::shared_ptr<SearchBackend> backend) {
  std::lock_guard<std::mutex> lock(mu_);
  search_ = std::move(backend);
}

void Gateway::SetWikiBackend(std::shared_ptr<WikiBackend> backend) {
  std::lock_guard<std::mutex> lock(mu_);
  wiki_ = std::move(backend);
}

RateLimiter* Gateway::LimiterFor(const std::string& provider_id) {
  if (options_.requests_per_second <= 0) return nullptr;
  std::lock_guard<std::mutex> lock(mu_);
  auto& limiter = limiters_[provider_id];
  if (!limiter) {
    limiter = std::make_unique<RateLimiter>(options_.requests_per_second,
                                            clock_);
  }
  return limiter.get();
}

ChatResponse Gateway::CallWithRetries(const ChatRequest& request,
                                      ChatProvider& provider) {
  RateLimiter* limiter = LimiterFor(request.provider_id);
  for (int attempt = 0;; ++attempt) {
    if (options_.call_budget > 0) {
      int64_t used = outbound_calls_.fetch_add(1);
      if (used >= options_.call_budget) {
        outbound_calls_.fetch_sub(1);
        throw Error(ErrorCode::kBudgetExceeded,
                    "call budget of " + std::to_string(options_.call_budget) +
                        " exhausted");
      }
    } else {
      outbound_calls_.fetch_add(1);
    }
    if (limiter) limiter->Acquire();
    try {
      ChatResponse response = provider.Complete(request);
      if (response.content.empty()) {
        throw Error(ErrorCode::kProviderUnreachable, "empty completion");
      }
      response.cached = false;
      return response;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kProviderUnreachable) throw;
      if (attempt >= options_.max_retries) {
        throw Error(ErrorCode::kProviderUnreachable,
                    request.provider_id + "/" + request.model_id + " after " +
                        std::to_string(attempt + 1) +
                        " attempts: " + e.what());
      }
    }
    ++retries_;
    clock_->SleepFor(options_.backoff_base * (int64_t{1} << attempt));
  }
}

std::optional<ChatResponse> Gateway::LoadCached(const std::string& hash) {
  if (options_.cache_dir.empty()) return std::nullopt;
  std::filesystem::path path =
      options_.cache_dir / hash.substr(0, 2) / (hash + ".json");
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    json entry = json::parse(in);
    return entry.at("response").get<ChatResponse>();
  } catch (const std::exception&) {
    return std::nullopt;  // unreadable entries are treated as misses
  }
}

void Gateway::StoreCached(const std::string& hash, const ChatRequest& request,
                          const ChatResponse& response) {
  if (options_.cache_dir.empty()) return;
  std::filesystem::path dir = options_.cache_dir / hash.substr(0, 2);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot create cache dir " + dir.string() + ": " + ec.message());
  }
  json entry;
  entry["request"] = request;
  entry["response"] = response;
  entry["timestamp"] = std::chrono::duration_cast<std::chrono::seconds>(
                           std::chrono::system_clock::now().time_since_epoch())
                           .count();
  std::ostringstream tid;
  tid << std::this_thread::get_id();
  std::filesystem::path final_path = dir / (hash + ".json");
  std::filesystem::path tmp_path = dir / (hash + ".json.tmp." + tid.str());
  {
    std::ofstream out(tmp_path, std::ios::trunc);
    out << entry.dump(2) << '\n';
    if (!out) {
      throw Error(ErrorCode::kIoError, "cannot write " + tmp_path.string());
    }
  }
  std::filesystem::rename(tmp_path, final_path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError, "cannot rename cache entry: " +
                                         ec.message());
  }
}

ChatResponse Gateway::Chat(const ChatRequest& request) {
  request.Validate();
  std::shared_ptr<ChatProvider> provider;
  {
    std::lock_guard<std::mutex> lock(mu_);
    auto it = providers_.find(request.provider_id);
    if (it == providers_.end()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "provider '" + request.provider_id + "' is not configured");
    }
    provider = it->second;
  }
  if (!options_.cache_enabled) return CallWithRetries(request, *provider);

  const std::string hash = request.Hash();
  std::promise<ChatResponse> promise;
  std::shared_future<ChatResponse> waiting;
  {
    std::unique_lock<std::mutex> lock(mu_);
    auto hit = memory_cache_.find(hash);
    if (hit != memory_cache_.end()) {
      ++cache_hits_;
      ChatResponse response = hit->second;
      response.cached = true;
      return response;
    }
    auto pending = in_flight_.find(hash);
    if (pending != in_flight_.end()) {
      waiting = pending->second;
    } else {
      in_flight_[hash] = promise.get_future().share();
    }
  }
  if (waiting.valid()) {
    ChatResponse response = waiting.get();
    ++cache_hits_;
    response.cached = true;
    return response;
  }

  auto finish = [&](const ChatResponse* response) {
    std::lock_guard<std::mutex> lock(mu_);
    if (response) memory_cache_[hash] = *response;
    in_flight_.erase(hash);
  };
  try {
    if (std::optional<ChatResponse> stored = LoadCached(hash)) {
      finish(&*stored);
      promise.set_value(*stored);
      ++cache_hits_;
      stored->cached = true;
      return *stored;
    }
    ChatResponse response = CallWithRetries(request, *provider);
    StoreCached(hash, request, response);
    finish(&response);
    promise.set_value(response);
    return response;
  } catch (...) {
    finish(nullptr);
    promise.set_exception(std::current_exception());
    throw;
  }
}

std::vector<SearchResult> Gateway::Search(const std::string& query,
                                          int top_k) {
  if (text::Trim(query).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "search query is empty");
  }
  if (top_k <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "top_k must be positive");
  }
  std::shared_ptr<SearchBackend> backend;
  {
    std::lock_guard<std::mutex> lock(mu_);
    backend = search_;
  }
  if (!backend) {
    throw Error(ErrorCode::kSearchUnavailable, "no search backend configured");
  }
  ++search_calls_;
  std::vector<SearchResult> results = backend->Search(query, top_k);
  std::stable_sort(results.begin(), results.end(),
                   [](const SearchResult& a, const SearchResult& b) {
                     return a.rank < b.rank;
                   });
  if (static_cast<int>(results.size()) > top_k) results.resize(top_k);
  if (results.empty()) {
    throw Error(ErrorCode::kEmptyResults, "no results for query");
  }
  for (size_t i = 0; i < results.size(); ++i) {
    results[i].rank = static_cast<int>(i) + 1;
  }
  return results;
}

WikiPage Gateway::WikiFetch(const std::string& entity) {
  if (text::Trim(entity).empty()) {
    throw Error(ErrorCode::kInvalidArgument, "wiki entity is empty");
  }
  std::shared_ptr<WikiBackend> backend;
  {
    std::lock_guard<std::mutex> lock(mu_);
    backend = wiki_;
  }
  if (!backend) {
    throw Error(ErrorCode::kWikiUnavailable, "no wiki backend configured");
  }
  ++wiki_calls_;
  WikiPage page = backend->Fetch(entity);
  if (!page.found) page.summary_text.clear();
  if (page.found && page.summary_text.empty()) page.found = false;
  return page;
}

GatewayStats Gateway::stats() const {
  GatewayStats s;
  s.outbound_calls = outbound_calls_.load();
  s.cache_hits = cache_hits_.load();
  s.retries = retries_.load();
  s.search_calls = search_calls_.load();
  s.wiki_calls = wiki_calls_.load();
  return s;
}

}  // namespace factarena

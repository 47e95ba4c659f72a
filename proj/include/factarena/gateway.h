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

// Provider-agnostic access to chat models, web search and Wikipedia.
//
// The Gateway owns caching, retries with exponential backoff, a per-provider
// rate limiter and a global call budget. Concrete backends (HTTP or scripted)
// only translate requests; they never retry on their own.

#ifndef FACTARENA_GATEWAY_H_
#define FACTARENA_GATEWAY_H_

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "factarena/common.h"
#include "json.hpp"

namespace factarena {

enum class Role { kSystem, kUser, kAssistant };

std::string_view RoleName(Role role);

struct ChatMessage {
  Role role = Role::kUser;
  std::string content;
};

struct ChatRequest {
  std::string provider_id;
  std::string model_id;
  std::vector<ChatMessage> messages;
  double temperature = 0.0;
  int max_tokens = 2048;
  // Human-readable lookup key for scripted providers ("extract:C1"). Not part
  // of the request hash.
  std::string scenario_key;

  // Throws kInvalidArgument unless messages are non-empty and roles alternate
  // user/assistant after an optional leading system message.
  void Validate() const;
  // SHA-256 over (provider_id, model_id, messages, temperature).
  std::string Hash() const;
};

struct Usage {
  int64_t prompt_tokens = 0;
  int64_t completion_tokens = 0;
};

struct ChatResponse {
  std::string content;
  Usage usage;
  bool cached = false;
};

struct SearchResult {
  int rank = 1;
  std::string title;
  std::string snippet;
  std::string url;
};

struct WikiPage {
  std::string entity;
  std::string summary_text;
  bool found = false;
};

void to_json(nlohmann::json& j, const ChatRequest& r);
void to_json(nlohmann::json& j, const ChatResponse& r);
void from_json(const nlohmann::json& j, ChatResponse& r);
void to_json(nlohmann::json& j, const SearchResult& r);
void from_json(const nlohmann::json& j, SearchResult& r);

// Backend interfaces. Implementations signal transient failures with
// kProviderUnreachable / kSearchUnavailable / kWikiUnavailable.
class ChatProvider {
 public:
  virtual ~ChatProvider() = default;
  virtual ChatResponse Complete(const ChatRequest& request) = 0;
};

class SearchBackend {
 public:
  virtual ~SearchBackend() = default;
  virtual std::vector<SearchResult> Search(const std::string& query,
                                           int top_k) = 0;
};

class WikiBackend {
 public:
  virtual ~WikiBackend() = default;
  virtual WikiPage Fetch(const std::string& entity) = 0;
};

// Time source used for backoff and rate limiting.
class Clock {
 public:
  using Duration = std::chrono::nanoseconds;
  using TimePoint = std::chrono::time_point<std::chrono::steady_clock, Duration>;

  virtual ~Clock() = default;
  virtual TimePoint Now() = 0;
  virtual void SleepUntil(TimePoint t) = 0;
  void SleepFor(Duration d) { SleepUntil(Now() + d); }
};

class SystemClock : public Clock {
 public:
  TimePoint Now() override;
  void SleepUntil(TimePoint t) override;
};

// Manually advanced clock. SleepUntil never blocks; it advances time to `t`
// when `t` is in the future and counts the sleep.
class FakeClock : public Clock {
 public:
  TimePoint Now() override;
  void SleepUntil(TimePoint t) override;
  void Advance(Duration d);
  int64_t sleeps() const { return sleeps_.load(); }
  Duration total_slept() const;

 private:
  mutable std::mutex mu_;
  TimePoint now_{};
  Duration slept_{0};
  std::atomic<int64_t> sleeps_{0};
};

// Admits at most `requests_per_second` callers per second. Each caller gets
// a slot at least 1/rps after the previous one and sleeps until it.
class RateLimiter {
 public:
  RateLimiter(double requests_per_second, std::shared_ptr<Clock> clock);
  // Blocks until admitted; returns the admission time.
  Clock::TimePoint Acquire();

 private:
  Clock::Duration interval_;
  std::shared_ptr<Clock> clock_;
  std::mutex mu_;
  std::optional<Clock::TimePoint> next_slot_;
};

// Pure lookup table standing in for a chat model. Lookup order for a request
// with model M and scenario key "stage:id":
//   "M/stage:id", "stage:id", first 16 hex chars of the request hash,
//   "M/stage:*", "stage:*", then the responder callback, then
//   default_response. An empty default means "no answer" (kProviderUnreachable).
class ScriptedProvider : public ChatProvider {
 public:
  using Responder =
      std::function<std::optional<std::string>(const ChatRequest&)>;

  ScriptedProvider(std::map<std::string, std::string> script,
                   std::string default_response, Responder responder = {});

  ChatResponse Complete(const ChatRequest& request) override;

  // Every request seen, in arrival order.
  std::vector<ChatRequest> Transcript() const;
  size_t call_count() const;

 private:
  std::map<std::string, std::string> script_;
  std::string default_response_;
  Responder responder_;
  mutable std::mutex mu_;
  std::vector<ChatRequest> transcript_;
};

class ScriptedSearch : public SearchBackend {
 public:
  // `fixtures` maps a query to its results; `default_results` answers any
  // other query. An empty answer means an empty index.
  ScriptedSearch(std::map<std::string, std::vector<SearchResult>> fixtures,
                 std::vector<SearchResult> default_results = {},
                 bool available = true);
  std::vector<SearchResult> Search(const std::string& query,
                                   int top_k) override;

 private:
  std::map<std::string, std::vector<SearchResult>> fixtures_;
  std::vector<SearchResult> default_results_;
  bool available_;
};

class ScriptedWiki : public WikiBackend {
 public:
  explicit ScriptedWiki(std::map<std::string, std::string> pages,
                        bool available = true);
  WikiPage Fetch(const std::string& entity) override;

 private:
  std::map<std::string, std::string> pages_;
  bool available_;
};

struct GatewayOptions {
  bool cache_enabled = false;
  // When set, cache entries are persisted as cache/<hash[0..2]>/<hash>.json.
  std::filesystem::path cache_dir;
  // Retries after the first attempt (so max_retries = 2 is 3 attempts).
  int max_retries = 2;
  std::chrono::milliseconds backoff_base{1000};
  // Maximum outbound chat calls; 0 means unlimited.
  int64_t call_budget = 0;
  // Per-provider admission rate; 0 disables limiting.
  double requests_per_second = 0.0;
};

struct GatewayStats {
  int64_t outbound_calls = 0;
  int64_t cache_hits = 0;
  int64_t retries = 0;
  int64_t search_calls = 0;
  int64_t wiki_calls = 0;
};

class Gateway {
 public:
  explicit Gateway(GatewayOptions options = {},
                   std::shared_ptr<Clock> clock = nullptr);

  void AddProvider(const std::string& provider_id,
                   std::shared_ptr<ChatProvider> provider);
  bool HasProvider(const std::string& provider_id) const;
  void SetSearchBackend(std::shared_ptr<SearchBackend> backend);
  void SetWikiBackend(std::shared_ptr<WikiBackend> backend);

  // Errors: kInvalidArgument, kProviderUnreachable (after retries),
  // kAuthError, kBudgetExceeded.
  ChatResponse Chat(const ChatRequest& request);

  // At most top_k results in ascending rank. Errors: kSearchUnavailable,
  // kEmptyResults.
  std::vector<SearchResult> Search(const std::string& query, int top_k);

  // Errors: kWikiUnavailable.
  WikiPage WikiFetch(const std::string& entity);

  GatewayStats stats() const;

 private:
  ChatResponse CallWithRetries(const ChatRequest& request,
                               ChatProvider& provider);
  std::optional<ChatResponse> LoadCached(const std::string& hash);
  void StoreCached(const std::string& hash, const ChatRequest& request,
                   const ChatResponse& response);
  RateLimiter* LimiterFor(const std::string& provider_id);

  GatewayOptions options_;
  std::shared_ptr<Clock> clock_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<ChatProvider>> providers_;
  std::map<std::string, std::unique_ptr<RateLimiter>> limiters_;
  std::shared_ptr<SearchBackend> search_;
  std::shared_ptr<WikiBackend> wiki_;
  std::map<std::string, ChatResponse> memory_cache_;
  std::map<std::string, std::shared_future<ChatResponse>> in_flight_;
  std::atomic<int64_t> outbound_calls_{0};
  std::atomic<int64_t> cache_hits_{0};
  std::atomic<int64_t> retries_{0};
  std::atomic<int64_t> search_calls_{0};
  std::atomic<int64_t> wiki_calls_{0};
};

// HTTP plumbing. The transport is injectable so status-code handling can be
// tested without a network.
struct HttpReply {
  int status = 0;  // 0 means the connection failed
  std::string body;
};

class HttpTransport {
 public:
  using Headers = std::map<std::string, std::string>;
  virtual ~HttpTransport() = default;
  virtual HttpReply Post(const std::string& url, const std::string& body,
                         const Headers& headers) = 0;
  virtual HttpReply Get(const std::string& url, const Headers& headers) = 0;
};

std::shared_ptr<HttpTransport> MakeHttplibTransport(
    std::chrono::seconds timeout = std::chrono::seconds(120));

// Chat-completions style endpoint: POST {base_url}/chat/completions with a
// bearer credential. 401/403 -> kAuthError; 429, 5xx and connection
// failures -> kProviderUnreachable.
class HttpChatProvider : public ChatProvider {
 public:
  HttpChatProvider(std::string base_url, std::string api_key,
                   std::shared_ptr<HttpTransport> transport);
  ChatResponse Complete(const ChatRequest& request) override;

 private:
  std::string base_url_;
  std::string api_key_;
  std::shared_ptr<HttpTransport> transport_;
};

// Reads FACTARENA_<PROVIDER>_BASE_URL and FACTARENA_<PROVIDER>_API_KEY.
// Throws kConfigError naming the missing variable.
std::shared_ptr<HttpChatProvider> MakeHttpChatProviderFromEnv(
    const std::string& provider_id, std::shared_ptr<HttpTransport> transport);
std::string ProviderEnvPrefix(const std::string& provider_id);

// Serper-style web search: POST {base_url} {"q": query, "num": k} with an
// X-API-KEY header, reading organic[].{title,snippet,link}.
class HttpSearchBackend : public SearchBackend {
 public:
  HttpSearchBackend(std::string base_url, std::string api_key,
                    std::shared_ptr<HttpTransport> transport);
  std::vector<SearchResult> Search(const std::string& query,
                                   int top_k) override;

 private:
  std::string base_url_;
  std::string api_key_;
  std::shared_ptr<HttpTransport> transport_;
};

// Uses FACTARENA_SEARCH_API_KEY and optional FACTARENA_SEARCH_BASE_URL.
std::shared_ptr<HttpSearchBackend> MakeHttpSearchBackendFromEnv(
    std::shared_ptr<HttpTransport> transport);

// Wikipedia REST summary endpoint: GET {base_url}/page/summary/<title>.
class HttpWikiBackend : public WikiBackend {
 public:
  HttpWikiBackend(std::string base_url,
                  std::shared_ptr<HttpTransport> transport);
  WikiPage Fetch(const std::string& entity) override;

 private:
  std::string base_url_;
  std::shared_ptr<HttpTransport> transport_;
};

}  // namespace factarena

#endif  // FACTARENA_GATEWAY_H_

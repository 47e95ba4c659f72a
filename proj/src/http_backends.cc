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

#include <cstdlib>
#include <sstream>

#include "factarena/gateway.h"
#include "factarena/text.h"
#include "httplib.h"

namespace factarena {
namespace {

using nlohmann::json;

// Splits "https://host:port/prefix" into ("https://host:port", "/prefix").
std::pair<std::string, std::string> SplitUrl(const std::string& url) {
  size_t scheme = url.find("://");
  size_t path_start =
      url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string TrimTrailingSlash(std::string s) {
  while (!s.empty() && s.back() == '/') s.pop_back();
  return s;
}

std::string PercentEncode(std::string_view s) {
  std::ostringstream out;
  static constexpr char kHex[] = "0123456789ABCDEF";
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out << c;
    } else if (c == ' ') {
      out << '_';  // Wikipedia titles use underscores
    } else {
      out << '%' << kHex[c >> 4] << kHex[c & 0xf];
    }
  }
  return out.str();
}

class HttplibTransport : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout) : timeout_(timeout) {}

  HttpReply Post(const std::string& url, const std::string& body,
                 const Headers& headers) override {
    auto [host, path] = SplitUrl(url);
    httplib::Client client(host);
    Configure(client);
    auto result = client.Post(path, ToHeaders(headers), body,
                              "application/json");
    return ToReply(result);
  }

  HttpReply Get(const std::string& url, const Headers& headers) override {
    auto [host, path] = SplitUrl(url);
    httplib::Client client(host);
    Configure(client);
    auto result = client.Get(path, ToHeaders(headers));
    return ToReply(result);
  }

 private:
  void Configure(httplib::Client& client) const {
    client.set_connection_timeout(std::chrono::seconds(15));
    client.set_read_timeout(timeout_);
    client.set_write_timeout(timeout_);
    client.set_follow_location(true);
  }

  static httplib::Headers ToHeaders(const Headers& headers) {
    httplib::Headers out;
    for (const auto& [k, v] : headers) out.emplace(k, v);
    return out;
  }

  static HttpReply ToReply(const httplib::Result& result) {
    if (!result) return HttpReply{0, httplib::to_string(result.error())};
    return HttpReply{result->status, result->body};
  }

  std::chrono::seconds timeout_;
};

std::string RequireEnv(const std::string& name) {
  const char* value = std::getenv(name.c_str());
  if (value == nullptr || *value == '\0') {
    throw Error(ErrorCode::kConfigError,
                "environment variable " + name + " is not set");
  }
  return value;
}

}  // namespace

std::shared_ptr<HttpTransport> MakeHttplibTransport(
    std::chrono::seconds timeout) {
  return std::make_shared<HttplibTransport>(timeout);
}

HttpChatProvider::HttpChatProvider(std::string base_url, std::string api_key,
                                   std::shared_ptr<HttpTransport> transport)
    : base_url_(TrimTrailingSlash(std::move(base_url))),
      api_key_(std::move(api_key)),
      transport_(std::move(transport)) {}

ChatResponse HttpChatProvider::Complete(const ChatRequest& request) {
  json body;
  body["model"] = request.model_id;
  body["temperature"] = request.temperature;
  body["max_tokens"] = request.max_tokens;
  body["messages"] = json::array();
  for (const ChatMessage& m : request.messages) {
    body["messages"].push_back(
        {{"role", RoleName(m.role)}, {"content", m.content}});
  }
  HttpReply reply = transport_->Post(
      base_url_ + "/chat/completions", body.dump(),
      {{"Authorization", "Bearer " + api_key_},
       {"Content-Type", "application/json"}});
  if (reply.status == 401 || reply.status == 403) {
    throw Error(ErrorCode::kAuthError,
                "credential rejected (HTTP " + std::to_string(reply.status) +
                    ")");
  }
  if (reply.status == 0 || reply.status == 408 || reply.status == 429 ||
      reply.status >= 500) {
    throw Error(ErrorCode::kProviderUnreachable,
                "HTTP " + std::to_string(reply.status) + " " + reply.body);
  }
  if (reply.status != 200) {
    throw Error(ErrorCode::kInvalidArgument,
                "HTTP " + std::to_string(reply.status) + " " + reply.body);
  }
  try {
    json parsed = json::parse(reply.body);
    ChatResponse response;
    const json& message = parsed.at("choices").at(0).at("message");
    if (message.contains("content") && message["content"].is_string()) {
      response.content = message["content"].get<std::string>();
    }
    if (parsed.contains("usage")) {
      response.usage.prompt_tokens =
          parsed["usage"].value("prompt_tokens", int64_t{0});
      response.usage.completion_tokens =
          parsed["usage"].value("completion_tokens", int64_t{0});
    }
    return response;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderUnreachable,
                std::string("malformed completion body: ") + e.what());
  }
}

std::string ProviderEnvPrefix(const std::string& provider_id) {
  std::string upper = text::ToUpper(provider_id);
  for (char& c : upper) {
    if (!std::isalnum(static_cast<unsigned char>(c))) c = '_';
  }
  return "FACTARENA_" + upper;
}

std::shared_ptr<HttpChatProvider> MakeHttpChatProviderFromEnv(
    const std::string& provider_id, std::shared_ptr<HttpTransport> transport) {
  const std::string prefix = ProviderEnvPrefix(provider_id);
  return std::make_shared<HttpChatProvider>(RequireEnv(prefix + "_BASE_URL"),
                                            RequireEnv(prefix + "_API_KEY"),
                                            std::move(transport));
}

HttpSearchBackend::HttpSearchBackend(std::string base_url, std::string api_key,
                                     std::shared_ptr<HttpTransport> transport)
    : base_url_(std::move(base_url)),
      api_key_(std::move(api_key)),
      transport_(std::move(transport)) {}

std::vector<SearchResult> HttpSearchBackend::Search(const std::string& query,
                                                    int top_k) {
  json body{{"q", query}, {"num", top_k}};
  HttpReply reply =
      transport_->Post(base_url_, body.dump(),
                       {{"X-API-KEY", api_key_},
                        {"Content-Type", "application/json"}});
  if (reply.status != 200) {
    throw Error(ErrorCode::kSearchUnavailable,
                "search HTTP " + std::to_string(reply.status));
  }
  std::vector<SearchResult> results;
  try {
    json parsed = json::parse(reply.body);
    int rank = 0;
    for (const json& item : parsed.value("organic", json::array())) {
      SearchResult r;
      r.rank = item.value("position", rank + 1);
      r.title = item.value("title", "");
      r.snippet = item.value("snippet", "");
      r.url = item.value("link", "");
      results.push_back(std::move(r));
      ++rank;
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSearchUnavailable,
                std::string("malformed search body: ") + e.what());
  }
  return results;
}

std::shared_ptr<HttpSearchBackend> MakeHttpSearchBackendFromEnv(
    std::shared_ptr<HttpTransport> transport) {
  const char* base = std::getenv("FACTARENA_SEARCH_BASE_URL");
  return std::make_shared<HttpSearchBackend>(
      base && *base ? base : "https://google.serper.dev/search",
      RequireEnv("FACTARENA_SEARCH_API_KEY"), std::move(transport));
}

HttpWikiBackend::HttpWikiBackend(std::string base_url,
                                 std::shared_ptr<HttpTransport> transport)
    : base_url_(TrimTrailingSlash(std::move(base_url))),
      transport_(std::move(transport)) {}

WikiPage HttpWikiBackend::Fetch(const std::string& entity) {
  HttpReply reply = transport_->Get(
      base_url_ + "/page/summary/" + PercentEncode(text::Trim(entity)),
      {{"Accept", "application/json"}});
  WikiPage page;
  page.entity = entity;
  if (reply.status == 404) return page;
  if (reply.status != 200) {
    throw Error(ErrorCode::kWikiUnavailable,
                "wiki HTTP " + std::to_string(reply.status));
  }
  try {
    json parsed = json::parse(reply.body);
    page.summary_text = parsed.value("extract", "");
    page.found = !page.summary_text.empty();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kWikiUnavailable,
                std::string("malformed wiki body: ") + e.what());
  }
  return page;
}

}  // namespace factarena

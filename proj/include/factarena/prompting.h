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

// Helpers for asking a model for structured output and re-prompting when
// the answer does not parse.

#ifndef FACTARENA_PROMPTING_H_
#define FACTARENA_PROMPTING_H_

#include <functional>
#include <optional>
#include <string>

#include "factarena/common.h"
#include "factarena/gateway.h"

namespace factarena {

struct Exchange {
  std::string last_raw;
  int attempts = 0;
};

// Sends `prompt` to `model`; on a parse failure appends the model's answer
// and `correction` to the conversation and asks again, up to `max_reprompts`
// times. Throws kParseError when every attempt fails.
template <typename T>
T AskStructured(Gateway& gateway, const ModelSpec& model,
                const std::string& scenario_key, const std::string& prompt,
                const std::function<std::optional<T>(const std::string&)>& parse,
                const std::string& correction, int max_reprompts,
                Exchange* exchange = nullptr) {
  ChatRequest request;
  request.provider_id = model.provider;
  request.model_id = model.id;
  request.scenario_key = scenario_key;
  request.messages.push_back({Role::kUser, prompt});
  Exchange local;
  Exchange& ex = exchange ? *exchange : local;
  for (int attempt = 0; attempt <= max_reprompts; ++attempt) {
    ChatResponse response = gateway.Chat(request);
    ex.last_raw = response.content;
    ex.attempts = attempt + 1;
    if (std::optional<T> parsed = parse(response.content)) return *parsed;
    request.messages.push_back({Role::kAssistant, response.content});
    request.messages.push_back({Role::kUser, correction});
  }
  throw Error(ErrorCode::kParseError,
              "'" + scenario_key + "' from " + model.id + " unparseable after " +
                  std::to_string(max_reprompts) + " re-prompts");
}

}  // namespace factarena

#endif  // FACTARENA_PROMPTING_H_

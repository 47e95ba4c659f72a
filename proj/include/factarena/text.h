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

// Small string helpers shared by the prompt builders and output parsers.

#ifndef FACTARENA_TEXT_H_
#define FACTARENA_TEXT_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace factarena::text {

std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);
std::string ToUpper(std::string_view s);
std::vector<std::string> SplitLines(std::string_view s);
bool StartsWith(std::string_view s, std::string_view prefix);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);

// Replaces every "{name}" occurrence for each key in `values`. Unknown
// placeholders are left untouched.
std::string FillTemplate(std::string_view tmpl,
                         const std::map<std::string, std::string>& values);

// Lower-cases, drops punctuation and collapses whitespace. Used to detect
// outputs that merely echo their input.
std::string NormalizeForComparison(std::string_view s);

// Parses a sequentially numbered list ("1. foo 2. bar" or one item per line,
// "1)" also accepted). Numbers must run 1, 2, 3, ...; numerals that break the
// sequence (years, quantities) stay part of the item text. Returns an empty
// vector when no item "1." is found.
std::vector<std::string> ParseNumberedList(std::string_view s);

// Lines starting with "-", "*" or a bullet character, marker stripped.
std::vector<std::string> ParseBulletList(std::string_view s);

// Formats items as "1. a\n2. b\n...".
std::string FormatNumberedList(const std::vector<std::string>& items);

}  // namespace factarena::text

#endif  // FACTARENA_TEXT_H_

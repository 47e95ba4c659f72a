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

#include "factarena/text.h"

#include <algorithm>
#include <cctype>
#include <optional>

namespace factarena::text {
namespace {

bool IsSpace(char c) { return std::isspace(static_cast<unsigned char>(c)); }
bool IsDigit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

// A list marker is `<n>.` or `<n>)` at the start of the text or after
// whitespace, followed by whitespace or end of text.
struct Marker {
  size_t begin;
  size_t end;
  long number;
};

std::optional<Marker> MarkerAt(std::string_view s, size_t pos) {
  if (pos > 0 && !IsSpace(s[pos - 1])) return std::nullopt;
  size_t i = pos;
  while (i < s.size() && IsDigit(s[i]) && i - pos < 6) ++i;
  if (i == pos || i >= s.size() || (s[i] != '.' && s[i] != ')')) {
    return std::nullopt;
  }
  size_t end = i + 1;
  if (end < s.size() && !IsSpace(s[end])) return std::nullopt;
  return Marker{pos, end, std::stol(std::string(s.substr(pos, i - pos)))};
}

}  // namespace

std::string Trim(std::string_view s) {
  size_t b = 0;
  size_t e = s.size();
  while (b < e && IsSpace(s[b])) ++b;
  while (e > b && IsSpace(s[e - 1])) --e;
  return std::string(s.substr(b, e - b));
}

std::string ToLower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::string ToUpper(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> SplitLines(std::string_view s) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= s.size()) {
    size_t nl = s.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(s.substr(start));
      break;
    }
    std::string_view line = s.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    start = nl + 1;
  }
  return lines;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

std::string Join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string FillTemplate(std::string_view tmpl,
                         const std::map<std::string, std::string>& values) {
  std::string out;
  out.reserve(tmpl.size());
  size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      size_t close = tmpl.find('}', i + 1);
      if (close != std::string_view::npos) {
        auto it = values.find(std::string(tmpl.substr(i + 1, close - i - 1)));
        if (it != values.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
      }
    }
    out.push_back(tmpl[i]);
    ++i;
  }
  return out;
}

std::string NormalizeForComparison(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u)) {
      if (pending_space && !out.empty()) out.push_back(' ');
      pending_space = false;
      out.push_back(static_cast<char>(std::tolower(u)));
    } else if (IsSpace(c)) {
      pending_space = true;
    }
  }
  return out;
}

std::vector<std::string> ParseNumberedList(std::string_view s) {
  std::vector<Marker> markers;
  long expected = 1;
  for (size_t pos = 0; pos < s.size(); ++pos) {
    if (!IsDigit(s[pos])) continue;
    auto marker = MarkerAt(s, pos);
    if (marker && marker->number == expected) {
      markers.push_back(*marker);
      ++expected;
      pos = marker->end - 1;
    } else {
      while (pos + 1 < s.size() && IsDigit(s[pos + 1])) ++pos;
    }
  }
  std::vector<std::string> items;
  for (size_t i = 0; i < markers.size(); ++i) {
    size_t end = i + 1 < markers.size() ? markers[i + 1].begin : s.size();
    std::string item = Trim(s.substr(markers[i].end, end - markers[i].end));
    // The final item may be followed by trailing prose on later lines.
    if (i + 1 == markers.size()) {
      size_t blank = item.find("\n\n");
      if (blank != std::string::npos) item = Trim(item.substr(0, blank));
    }
    if (!item.empty()) items.push_back(std::move(item));
  }
  return items;
}

std::vector<std::string> ParseBulletList(std::string_view s) {
  std::vector<std::string> items;
  for (const std::string& raw : SplitLines(s)) {
    std::string line = Trim(raw);
    std::string_view rest;
    if (StartsWith(line, "- ") || StartsWith(line, "* ")) {
      rest = std::string_view(line).substr(2);
    } else if (StartsWith(line, "•")) {
      rest = std::string_view(line).substr(std::string_view("•").size());
    } else {
      continue;
    }
    std::string item = Trim(rest);
    if (!item.empty()) items.push_back(std::move(item));
  }
  return items;
}

std::string FormatNumberedList(const std::vector<std::string>& items) {
  std::string out;
  for (size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += '\n';
    out += std::to_string(i + 1) + ". " + items[i];
  }
  return out;
}

}  // namespace factarena::text

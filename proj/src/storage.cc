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

#include "factarena/storage.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <iomanip>
#include <set>
#include <sstream>

#include "factarena/common.h"
#include "factarena/hash.h"
#include "factarena/text.h"

namespace factarena {

using json = nlohmann::json;

namespace {

constexpr std::array<std::string_view, 9> kKindNames = {
    "claim",  "run",     "guideline", "plan_entry",     "battle",
    "judgment", "outcome", "lineage",  "rating_snapshot"};

const std::map<RecordKind, std::vector<std::string>>& RequiredFields() {
  static const auto* fields = new std::map<RecordKind, std::vector<std::string>>{
      {RecordKind::kClaim, {"claim_id", "text", "gold_verdict", "source"}},
      {RecordKind::kRun, {"run_id", "claim_id", "model_id", "valid"}},
      {RecordKind::kGuideline, {"type", "claim_id"}},
      {RecordKind::kPlanEntry, {"claim_id", "model_a", "model_b"}},
      {RecordKind::kBattle,
       {"battle_id", "claim_id", "model_a", "model_b", "run_a", "run_b"}},
      {RecordKind::kJudgment, {"battle_id", "judge_id", "valid"}},
      {RecordKind::kOutcome,
       {"battle_id", "claim_id", "model_a", "model_b", "outcomes",
        "quorum_met"}},
      {RecordKind::kLineage, {"root_claim_id", "stages", "status"}},
      {RecordKind::kRatingSnapshot, {"dimension", "method", "ratings"}},
  };
  return *fields;
}

std::string WallClockTimestamp() {
  std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string Str(const json& payload, const char* key) {
  auto it = payload.find(key);
  return it != payload.end() && it->is_string() ? it->get<std::string>() : "";
}

}  // namespace

std::string_view RecordKindName(RecordKind kind) {
  return kKindNames[static_cast<int>(kind)];
}

std::optional<RecordKind> ParseRecordKind(std::string_view name) {
  for (size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<RecordKind>(i);
  }
  return std::nullopt;
}

void ValidatePayload(RecordKind kind, const json& payload) {
  if (!payload.is_object()) {
    throw Error(ErrorCode::kSchemaViolation,
                std::string(RecordKindName(kind)) + " payload is not an object");
  }
  for (const std::string& field : RequiredFields().at(kind)) {
    if (!payload.contains(field) || payload.at(field).is_null()) {
      throw Error(ErrorCode::kSchemaViolation,
                  std::string(RecordKindName(kind)) + " payload missing '" +
                      field + "'");
    }
  }
}

json RecordToJson(const Record& record) {
  return json{{"seq", record.seq},
              {"kind", RecordKindName(record.kind)},
              {"schema_version", record.schema_version},
              {"timestamp", record.timestamp},
              {"payload", record.payload}};
}

Record RecordFromJson(const json& j) {
  if (!j.is_object() || !j.contains("kind") || !j.contains("payload") ||
      !j.contains("seq") || !j.at("kind").is_string() ||
      !j.at("seq").is_number_integer()) {
    throw Error(ErrorCode::kCorruptLine, "malformed record envelope");
  }
  std::optional<RecordKind> kind =
      ParseRecordKind(j.at("kind").get<std::string>());
  if (!kind) {
    throw Error(ErrorCode::kCorruptLine,
                "unknown record kind '" + j.at("kind").get<std::string>() + "'");
  }
  Record record;
  record.seq = j.at("seq").get<int64_t>();
  record.kind = *kind;
  record.schema_version = j.value("schema_version", kSchemaVersion);
  record.timestamp = j.value("timestamp", json());
  record.payload = j.at("payload");
  ValidatePayload(record.kind, record.payload);
  return record;
}

RecordPool::RecordPool(std::filesystem::path path, PoolOptions options)
    : path_(std::move(path)), options_(options) {
  if (path_.empty()) return;
  if (std::filesystem::exists(path_)) {
    LoadedPool loaded = LoadAndCheck(path_, /*strict=*/true);
    records_ = std::move(loaded.records);
    if (!records_.empty()) next_seq_ = records_.back().seq + 1;
  } else if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) {
    throw Error(ErrorCode::kIoError, "cannot open pool " + path_.string());
  }
}

Receipt RecordPool::Append(RecordKind kind, json payload) {
  ValidatePayload(kind, payload);
  std::lock_guard<std::mutex> lock(mu_);
  Record record;
  record.seq = next_seq_;
  record.kind = kind;
  record.timestamp = options_.wall_clock_timestamps ? json(WallClockTimestamp())
                                                    : json(record.seq);
  record.payload = std::move(payload);
  if (out_.is_open()) {
    std::string line = RecordToJson(record).dump() + "\n";
    out_.write(line.data(), static_cast<std::streamsize>(line.size()));
    out_.flush();
    if (!out_) {
      throw Error(ErrorCode::kIoError, "append to " + path_.string() + " failed");
    }
  }
  ++next_seq_;
  records_.push_back(std::move(record));
  return Receipt{records_.back().seq};
}

std::vector<Record> RecordPool::Snapshot() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_;
}

std::vector<json> RecordPool::Payloads(RecordKind kind) const {
  std::lock_guard<std::mutex> lock(mu_);
  std::vector<json> payloads;
  for (const Record& r : records_) {
    if (r.kind == kind) payloads.push_back(r.payload);
  }
  return payloads;
}

size_t RecordPool::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return records_.size();
}

IntegrityReport CheckIntegrity(std::span<const Record> records) {
  IntegrityReport report;
  for (std::string_view name : kKindNames) report.counts[std::string(name)] = 0;
  std::set<std::string> claims, runs, battles;
  for (const Record& r : records) {
    if (r.kind == RecordKind::kClaim) claims.insert(Str(r.payload, "claim_id"));
    if (r.kind == RecordKind::kRun) runs.insert(Str(r.payload, "run_id"));
    if (r.kind == RecordKind::kBattle) {
      battles.insert(Str(r.payload, "battle_id"));
    }
  }
  std::set<std::string> seen;
  int64_t last_seq = 0;
  auto dangling = [&](const Record& r, const std::string& what,
                      const std::string& id) {
    report.dangling.push_back("seq " + std::to_string(r.seq) + " (" +
                              std::string(RecordKindName(r.kind)) + "): " +
                              what + " '" + id + "' not found");
  };
  auto unique = [&](const Record& r, const std::string& key) {
    if (!seen.insert(std::string(RecordKindName(r.kind)) + "|" + key).second) {
      report.duplicates.push_back("seq " + std::to_string(r.seq) + " (" +
                                  std::string(RecordKindName(r.kind)) +
                                  "): duplicate '" + key + "'");
    }
  };
  for (const Record& r : records) {
    ++report.counts[std::string(RecordKindName(r.kind))];
    if (r.seq <= last_seq) {
      report.duplicates.push_back("seq " + std::to_string(r.seq) +
                                  ": sequence number not increasing");
    }
    last_seq = r.seq;
    const json& p = r.payload;
    switch (r.kind) {
      case RecordKind::kClaim:
        unique(r, Str(p, "claim_id"));
        break;
      case RecordKind::kRun:
        unique(r, Str(p, "run_id"));
        if (!claims.count(Str(p, "claim_id"))) {
          dangling(r, "claim", Str(p, "claim_id"));
        }
        break;
      case RecordKind::kGuideline:
        unique(r, Str(p, "type") + "/" + Str(p, "claim_id"));
        if (!claims.count(Str(p, "claim_id"))) {
          dangling(r, "claim", Str(p, "claim_id"));
        }
        break;
      case RecordKind::kPlanEntry:
        unique(r, Str(p, "claim_id") + "/" + Str(p, "model_a") + "/" +
                      Str(p, "model_b"));
        if (!claims.count(Str(p, "claim_id"))) {
          dangling(r, "claim", Str(p, "claim_id"));
        }
        break;
      case RecordKind::kBattle:
        unique(r, Str(p, "battle_id"));
        if (!claims.count(Str(p, "claim_id"))) {
          dangling(r, "claim", Str(p, "claim_id"));
        }
        for (const char* key : {"run_a", "run_b"}) {
          if (!runs.count(Str(p, key))) dangling(r, "run", Str(p, key));
        }
        break;
      case RecordKind::kJudgment:
        unique(r, Str(p, "battle_id") + "/" + Str(p, "judge_id"));
        if (!battles.count(Str(p, "battle_id"))) {
          dangling(r, "battle", Str(p, "battle_id"));
        }
        break;
      case RecordKind::kOutcome:
        unique(r, Str(p, "battle_id"));
        // Simulated outcomes have no backing battle by construction.
        if (!p.value("synthetic", false) &&
            !battles.count(Str(p, "battle_id"))) {
          dangling(r, "battle", Str(p, "battle_id"));
        }
        break;
      case RecordKind::kLineage:
        unique(r, Str(p, "root_claim_id"));
        if (p.at("stages").is_array()) {
          for (const json& stage : p.at("stages")) {
            std::string id = Str(stage, "claim_id");
            if (!claims.count(id)) dangling(r, "claim", id);
          }
        }
        break;
      case RecordKind::kRatingSnapshot:
        break;
    }
  }
  return report;
}

LoadedPool LoadAndCheck(const std::filesystem::path& path, bool strict) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  LoadedPool loaded;
  std::string line;
  int64_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    bool terminated = !in.eof();
    if (line.empty() && !terminated) break;
    try {
      if (!terminated) {
        throw Error(ErrorCode::kCorruptLine, "missing line terminator");
      }
      json j = json::parse(line);
      loaded.records.push_back(RecordFromJson(j));
    } catch (const std::exception& e) {
      if (strict) {
        throw Error(ErrorCode::kCorruptLine,
                    path.string() + " line " + std::to_string(line_no) + ": " +
                        e.what());
      }
      loaded.report.corrupt_lines.push_back(line_no);
      ++loaded.report.skipped_lines;
    }
  }
  std::vector<int64_t> corrupt = std::move(loaded.report.corrupt_lines);
  int64_t skipped = loaded.report.skipped_lines;
  loaded.report = CheckIntegrity(loaded.records);
  loaded.report.corrupt_lines = std::move(corrupt);
  loaded.report.skipped_lines = skipped;
  return loaded;
}

DatasetFormat ParseDatasetFormat(std::string_view name) {
  std::string lower = text::ToLower(std::string(name));
  if (lower == "hover") return DatasetFormat::kHover;
  if (lower == "feverous") return DatasetFormat::kFeverous;
  if (lower == "jsonl") return DatasetFormat::kJsonl;
  throw Error(ErrorCode::kInvalidArgument,
              "unknown dataset format '" + std::string(name) + "'");
}

namespace {

std::optional<Verdict> MapLabel(DatasetFormat format, const std::string& raw) {
  std::string label = text::ToUpper(text::Trim(raw));
  if (format == DatasetFormat::kHover) {
    if (label == "SUPPORTED") return Verdict::kSupported;
    if (label == "NOT_SUPPORTED" || label == "REFUTED") {
      return Verdict::kRefuted;
    }
    return std::nullopt;
  }
  if (label == "SUPPORTS" || label == "SUPPORTED") return Verdict::kSupported;
  if (label == "REFUTES" || label == "REFUTED") return Verdict::kRefuted;
  return std::nullopt;
}

std::string IdString(const json& value) {
  if (value.is_string()) return value.get<std::string>();
  if (value.is_number_integer()) return std::to_string(value.get<int64_t>());
  return value.dump();
}

}  // namespace

IngestResult IngestClaims(const std::filesystem::path& dataset,
                          DatasetFormat format, int64_t limit, uint64_t seed) {
  std::string contents = ReadFile(dataset);
  std::vector<json> rows;
  try {
    if (format == DatasetFormat::kHover) {
      json all = json::parse(contents);
      if (!all.is_array()) {
        throw Error(ErrorCode::kSchemaViolation, "HOVER file is not an array");
      }
      rows.assign(all.begin(), all.end());
    } else {
      for (const std::string& line : text::SplitLines(contents)) {
        if (text::Trim(line).empty()) continue;
        rows.push_back(json::parse(line));
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchemaViolation,
                dataset.string() + ": " + std::string(e.what()));
  }

  IngestResult result;
  std::vector<Claim> mapped;
  for (const json& row : rows) {
    if (!row.is_object()) continue;
    ++result.rows;
    if (format == DatasetFormat::kJsonl) {
      try {
        Claim claim = row.get<Claim>();
        claim.Validate();
        mapped.push_back(std::move(claim));
      } catch (const std::exception&) {
        ++result.unmappable;
      }
      continue;
    }
    std::string text = row.is_object() ? Str(row, "claim") : "";
    // FEVEROUS files open with a header row that carries no claim.
    if (text::Trim(text).empty()) {
      --result.rows;
      continue;
    }
    std::optional<Verdict> verdict = MapLabel(format, Str(row, "label"));
    if (!verdict) {
      ++result.unmappable;
      continue;
    }
    Claim claim;
    bool hover = format == DatasetFormat::kHover;
    const char* id_key = hover ? "uid" : "id";
    claim.claim_id = std::string(hover ? "hover/" : "feverous/") +
                     (row.contains(id_key) ? IdString(row.at(id_key))
                                           : std::to_string(result.rows));
    claim.text = text::Trim(text);
    claim.gold_verdict = *verdict;
    claim.source = hover ? ClaimSource::kHover : ClaimSource::kFeverous;
    mapped.push_back(std::move(claim));
  }

  if (limit < 0 || static_cast<size_t>(limit) >= mapped.size()) {
    result.claims = std::move(mapped);
    return result;
  }
  std::vector<size_t> order(mapped.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(DeriveSeed(seed, "ingest/" + dataset.filename().string()));
  rng.Shuffle(order);
  order.resize(static_cast<size_t>(limit));
  std::sort(order.begin(), order.end());
  for (size_t i : order) result.claims.push_back(std::move(mapped[i]));
  return result;
}

std::filesystem::path ManifestPath(const std::filesystem::path& pool_path) {
  return std::filesystem::path(pool_path.string() + ".manifest.json");
}

void WriteManifest(const std::filesystem::path& path, const RunManifest& m) {
  json j{{"run_name", m.run_name},
         {"seed", m.seed},
         {"config", m.config},
         {"config_digest", m.config_digest},
         {"model_pool", m.model_pool},
         {"claim_source_digests", m.claim_source_digests},
         {"phases", m.phases}};
  WriteFileAtomic(path, j.dump(2) + "\n");
}

std::optional<RunManifest> ReadManifest(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return std::nullopt;
  json j;
  try {
    j = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kIntegrityError,
                "manifest " + path.string() + ": " + e.what());
  }
  RunManifest m;
  m.run_name = j.value("run_name", "");
  m.seed = j.value("seed", uint64_t{0});
  m.config = j.value("config", json::object());
  m.config_digest = j.value("config_digest", "");
  m.model_pool = j.value("model_pool", std::vector<std::string>{});
  m.claim_source_digests = j.value("claim_source_digests",
                                   std::map<std::string, std::string>{});
  m.phases = j.value("phases", std::map<std::string, bool>{});
  return m;
}

void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << contents;
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw Error(ErrorCode::kIoError,
                "cannot rename into " + path.string() + ": " + ec.message());
  }
}

std::string ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace factarena

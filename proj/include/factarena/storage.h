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

// Append-only JSONL record pool, integrity checking, dataset ingestion and
// the run manifest sidecar.

#ifndef FACTARENA_STORAGE_H_
#define FACTARENA_STORAGE_H_

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "factarena/pipeline.h"
#include "json.hpp"

namespace factarena {

inline constexpr int kSchemaVersion = 1;

enum class RecordKind {
  kClaim,
  kRun,
  kGuideline,
  kPlanEntry,
  kBattle,
  kJudgment,
  kOutcome,
  kLineage,
  kRatingSnapshot,
};

std::string_view RecordKindName(RecordKind kind);
std::optional<RecordKind> ParseRecordKind(std::string_view name);

struct Record {
  int64_t seq = 0;
  RecordKind kind = RecordKind::kClaim;
  int schema_version = kSchemaVersion;
  nlohmann::json timestamp;
  nlohmann::json payload;
};

nlohmann::json RecordToJson(const Record& record);
// kCorruptLine for malformed envelopes, kSchemaViolation for bad payloads.
Record RecordFromJson(const nlohmann::json& j);

// Throws kSchemaViolation if `payload` lacks a field its kind requires.
void ValidatePayload(RecordKind kind, const nlohmann::json& payload);

struct Receipt {
  int64_t seq = 0;
};

struct PoolOptions {
  // Logical timestamps (the sequence number) keep replays byte-identical;
  // wall-clock timestamps are opt-in.
  bool wall_clock_timestamps = false;
};

// Thread-safe append-only store. An empty path keeps records in memory.
class RecordPool {
 public:
  explicit RecordPool(std::filesystem::path path = {},
                      PoolOptions options = {});
  RecordPool(const RecordPool&) = delete;
  RecordPool& operator=(const RecordPool&) = delete;

  Receipt Append(RecordKind kind, nlohmann::json payload);

  std::vector<Record> Snapshot() const;
  std::vector<nlohmann::json> Payloads(RecordKind kind) const;
  size_t size() const;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
  PoolOptions options_;
  mutable std::mutex mu_;
  std::vector<Record> records_;
  int64_t next_seq_ = 1;
  std::ofstream out_;
};

struct IntegrityReport {
  std::map<std::string, int64_t> counts;
  std::vector<std::string> dangling;
  std::vector<std::string> duplicates;
  std::vector<int64_t> corrupt_lines;
  int64_t skipped_lines = 0;

  bool clean() const {
    return dangling.empty() && duplicates.empty() && corrupt_lines.empty();
  }
};

IntegrityReport CheckIntegrity(std::span<const Record> records);

struct LoadedPool {
  std::vector<Record> records;
  IntegrityReport report;
};

// Strict mode throws kCorruptLine naming the first bad line; lenient mode
// skips such lines and counts them. kIoError if the file cannot be read.
LoadedPool LoadAndCheck(const std::filesystem::path& path, bool strict);

enum class DatasetFormat { kHover, kFeverous, kJsonl };

DatasetFormat ParseDatasetFormat(std::string_view name);

struct IngestResult {
  std::vector<Claim> claims;
  int64_t rows = 0;
  int64_t unmappable = 0;
};

// HOVER: a JSON array of {uid, claim, label in SUPPORTED/NOT_SUPPORTED}.
// FEVEROUS: JSONL of {id, claim, label in SUPPORTS/REFUTES/...}.
// Generic JSONL: Claim objects. Rows outside the binary label scheme are
// skipped and counted. A negative limit keeps every row; otherwise a
// seed-deterministic uniform sample of `limit` rows, kept in file order.
IngestResult IngestClaims(const std::filesystem::path& dataset,
                          DatasetFormat format, int64_t limit, uint64_t seed);

struct RunManifest {
  std::string run_name;
  uint64_t seed = 0;
  nlohmann::json config;
  std::string config_digest;
  std::vector<std::string> model_pool;
  std::map<std::string, std::string> claim_source_digests;
  std::map<std::string, bool> phases;
};

std::filesystem::path ManifestPath(const std::filesystem::path& pool_path);
void WriteManifest(const std::filesystem::path& path, const RunManifest& m);
std::optional<RunManifest> ReadManifest(const std::filesystem::path& path);

// Writes `contents` to a temporary sibling and renames it into place.
void WriteFileAtomic(const std::filesystem::path& path,
                     const std::string& contents);
std::string ReadFile(const std::filesystem::path& path);

}  // namespace factarena

#endif  // FACTARENA_STORAGE_H_

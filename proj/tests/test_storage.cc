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

#include <set>

#include <gtest/gtest.h>

#include "factarena/hash.h"
#include "test_util.h"

namespace factarena {
namespace {

using nlohmann::json;
using testing::ReadText;
using testing::TempDir;
using testing::WriteText;

json ClaimPayload(const std::string& id) {
  return json(testing::MakeClaim(id, "Text of " + id, Verdict::kSupported));
}

json OutcomePayload(const std::string& battle) {
  return {{"battle_id", battle}, {"claim_id", "c1"}, {"model_a", "a"},
          {"model_b", "b"},      {"outcomes", json::object()},
          {"quorum_met", true}};
}

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return ErrorCode::kInvalidArgument;
}

TEST(RecordPoolTest, SequenceNumbersIncrease) {
  RecordPool pool;
  Receipt a = pool.Append(RecordKind::kClaim, ClaimPayload("c1"));
  Receipt b = pool.Append(RecordKind::kClaim, ClaimPayload("c2"));
  EXPECT_EQ(a.seq, 1);
  EXPECT_GT(b.seq, a.seq);
  EXPECT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool.Payloads(RecordKind::kClaim).size(), 2u);
  EXPECT_TRUE(pool.Payloads(RecordKind::kRun).empty());
}

TEST(RecordPoolTest, SchemaViolation) {
  RecordPool pool;
  json bad = OutcomePayload("b1");
  bad.erase("battle_id");
  EXPECT_EQ(CodeOf([&] { pool.Append(RecordKind::kOutcome, bad); }),
            ErrorCode::kSchemaViolation);
  EXPECT_EQ(pool.size(), 0u);
  EXPECT_EQ(CodeOf([&] { ValidatePayload(RecordKind::kClaim, json::array()); }),
            ErrorCode::kSchemaViolation);
}

TEST(RecordPoolTest, PersistsAndReloads) {
  TempDir dir;
  {
    RecordPool pool(dir / "pool.jsonl");
    pool.Append(RecordKind::kClaim, ClaimPayload("c1"));
  }
  RecordPool reopened(dir / "pool.jsonl");
  EXPECT_EQ(reopened.size(), 1u);
  EXPECT_EQ(reopened.Append(RecordKind::kClaim, ClaimPayload("c2")).seq, 2);
  std::string contents = ReadText(dir / "pool.jsonl");
  EXPECT_EQ(std::count(contents.begin(), contents.end(), '\n'), 2);
  json first = json::parse(contents.substr(0, contents.find('\n')));
  EXPECT_EQ(first.at("kind"), "claim");
  EXPECT_EQ(first.at("schema_version"), kSchemaVersion);
  EXPECT_EQ(first.at("seq"), 1);
}

TEST(RecordPoolTest, AppendOnlyPrefixStability) {
  TempDir dir;
  RecordPool pool(dir / "pool.jsonl");
  std::vector<std::string> snapshots;
  for (int i = 0; i < 5; ++i) {
    pool.Append(RecordKind::kClaim, ClaimPayload("c" + std::to_string(i)));
    snapshots.push_back(ReadText(dir / "pool.jsonl"));
  }
  for (size_t i = 1; i < snapshots.size(); ++i) {
    const std::string& before = snapshots[i - 1];
    EXPECT_EQ(Sha256Hex(snapshots[i].substr(0, before.size())), Sha256Hex(before));
  }
}

TEST(RecordPoolTest, ConcurrentAppendsKeepEveryLine) {
  TempDir dir;
  RecordPool pool(dir / "pool.jsonl");
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      for (int i = 0; i < 50; ++i) {
        pool.Append(RecordKind::kClaim,
                    ClaimPayload("c" + std::to_string(t) + "_" + std::to_string(i)));
      }
    });
  }
  for (auto& th : threads) th.join();
  LoadedPool loaded = LoadAndCheck(dir / "pool.jsonl", true);
  EXPECT_EQ(loaded.records.size(), 200u);
  EXPECT_TRUE(loaded.report.clean());
  for (size_t i = 0; i < loaded.records.size(); ++i) {
    EXPECT_EQ(loaded.records[i].seq, static_cast<int64_t>(i + 1));
  }
}

TEST(IntegrityTest, DanglingJudgment) {
  RecordPool pool;
  pool.Append(RecordKind::kClaim, ClaimPayload("c1"));
  pool.Append(RecordKind::kJudgment,
              {{"battle_id", "battle/deleted"}, {"judge_id", "j"}, {"valid", false}});
  IntegrityReport report = CheckIntegrity(pool.Snapshot());
  EXPECT_FALSE(report.clean());
  ASSERT_EQ(report.dangling.size(), 1u);
  EXPECT_NE(report.dangling[0].find("battle/deleted"), std::string::npos);
  EXPECT_EQ(report.counts.at("claim"), 1);
}

TEST(IntegrityTest, DuplicateClaim) {
  RecordPool pool;
  pool.Append(RecordKind::kClaim, ClaimPayload("c1"));
  pool.Append(RecordKind::kClaim, ClaimPayload("c1"));
  IntegrityReport report = CheckIntegrity(pool.Snapshot());
  EXPECT_EQ(report.duplicates.size(), 1u);
}

TEST(IntegrityTest, SyntheticOutcomesNeedNoBattle) {
  RecordPool pool;
  json o = OutcomePayload("sim/1");
  o["synthetic"] = true;
  pool.Append(RecordKind::kOutcome, o);
  EXPECT_TRUE(CheckIntegrity(pool.Snapshot()).clean());
  pool.Append(RecordKind::kOutcome, OutcomePayload("real/1"));
  EXPECT_FALSE(CheckIntegrity(pool.Snapshot()).clean());
}

TEST(LoadAndCheckTest, TruncatedFinalLine) {
  TempDir dir;
  {
    RecordPool pool(dir / "pool.jsonl");
    pool.Append(RecordKind::kClaim, ClaimPayload("c1"));
    pool.Append(RecordKind::kClaim, ClaimPayload("c2"));
  }
  std::string contents = ReadText(dir / "pool.jsonl");
  WriteText(dir / "pool.jsonl", contents.substr(0, contents.size() - 10));
  LoadedPool lenient = LoadAndCheck(dir / "pool.jsonl", false);
  EXPECT_EQ(lenient.records.size(), 1u);
  EXPECT_EQ(lenient.report.skipped_lines, 1);
  ASSERT_EQ(lenient.report.corrupt_lines.size(), 1u);
  EXPECT_EQ(lenient.report.corrupt_lines[0], 2);
  EXPECT_EQ(CodeOf([&] { LoadAndCheck(dir / "pool.jsonl", true); }),
            ErrorCode::kCorruptLine);
}

TEST(LoadAndCheckTest, MissingFile) {
  TempDir dir;
  EXPECT_EQ(CodeOf([&] { LoadAndCheck(dir / "absent.jsonl", true); }),
            ErrorCode::kIoError);
}

TEST(RecordJsonTest, EnvelopeRoundTrip) {
  Record r;
  r.seq = 7;
  r.kind = RecordKind::kOutcome;
  r.timestamp = 7;
  r.payload = OutcomePayload("b");
  Record back = RecordFromJson(RecordToJson(r));
  EXPECT_EQ(back.seq, 7);
  EXPECT_EQ(back.kind, RecordKind::kOutcome);
  EXPECT_EQ(back.payload, r.payload);
  EXPECT_EQ(CodeOf([] { RecordFromJson(json{{"seq", 1}, {"kind", "nope"}}); }),
            ErrorCode::kCorruptLine);
  for (RecordKind k : {RecordKind::kClaim, RecordKind::kRun, RecordKind::kGuideline,
                       RecordKind::kPlanEntry, RecordKind::kBattle,
                       RecordKind::kJudgment, RecordKind::kOutcome,
                       RecordKind::kLineage, RecordKind::kRatingSnapshot}) {
    EXPECT_EQ(ParseRecordKind(RecordKindName(k)), k);
  }
}

std::string HoverFile(int rows) {
  json all = json::array();
  for (int i = 0; i < rows; ++i) {
    all.push_back({{"uid", "u" + std::to_string(i)},
                   {"claim", "Hover claim " + std::to_string(i)},
                   {"label", i % 2 ? "NOT_SUPPORTED" : "SUPPORTED"}});
  }
  return all.dump();
}

TEST(IngestTest, HoverMapping) {
  TempDir dir;
  WriteText(dir / "hover.json", HoverFile(4));
  IngestResult r = IngestClaims(dir / "hover.json", DatasetFormat::kHover, -1, 1);
  ASSERT_EQ(r.claims.size(), 4u);
  EXPECT_EQ(r.claims[0].claim_id, "hover/u0");
  EXPECT_EQ(r.claims[0].gold_verdict, Verdict::kSupported);
  EXPECT_EQ(r.claims[1].gold_verdict, Verdict::kRefuted);
  EXPECT_EQ(r.claims[1].source, ClaimSource::kHover);
}

TEST(IngestTest, FeverousSkipsNonBinaryLabels) {
  TempDir dir;
  WriteText(dir / "feverous.jsonl",
            "{\"header\": true}\n"
            "{\"id\": 1, \"claim\": \"A\", \"label\": \"SUPPORTS\"}\n"
            "{\"id\": 2, \"claim\": \"B\", \"label\": \"NOT ENOUGH INFO\"}\n"
            "{\"id\": 3, \"claim\": \"C\", \"label\": \"REFUTES\"}\n");
  IngestResult r = IngestClaims(dir / "feverous.jsonl", DatasetFormat::kFeverous, -1, 1);
  ASSERT_EQ(r.claims.size(), 2u);
  EXPECT_EQ(r.unmappable, 1);
  EXPECT_EQ(r.claims[1].claim_id, "feverous/3");
  EXPECT_EQ(r.claims[1].gold_verdict, Verdict::kRefuted);
  EXPECT_EQ(r.claims[1].source, ClaimSource::kFeverous);
}

TEST(IngestTest, LimitSamplingIsDeterministic) {
  TempDir dir;
  WriteText(dir / "hover.json", HoverFile(500));
  IngestResult a = IngestClaims(dir / "hover.json", DatasetFormat::kHover, 200, 42);
  IngestResult b = IngestClaims(dir / "hover.json", DatasetFormat::kHover, 200, 42);
  IngestResult c = IngestClaims(dir / "hover.json", DatasetFormat::kHover, 200, 43);
  ASSERT_EQ(a.claims.size(), 200u);
  std::vector<std::string> ids_a, ids_b, ids_c;
  for (const auto& x : a.claims) ids_a.push_back(x.claim_id);
  for (const auto& x : b.claims) ids_b.push_back(x.claim_id);
  for (const auto& x : c.claims) ids_c.push_back(x.claim_id);
  EXPECT_EQ(ids_a, ids_b);
  EXPECT_NE(ids_a, ids_c);
  EXPECT_EQ(std::set<std::string>(ids_a.begin(), ids_a.end()).size(), 200u);
  EXPECT_TRUE(IngestClaims(dir / "hover.json", DatasetFormat::kHover, 0, 42).claims.empty());
}

TEST(IngestTest, GenericJsonl) {
  TempDir dir;
  WriteText(dir / "claims.jsonl",
            json(testing::MakeClaim("x1", "T", Verdict::kRefuted)).dump() + "\n" +
                "{\"claim_id\": \"x2\"}\n");
  IngestResult r = IngestClaims(dir / "claims.jsonl", DatasetFormat::kJsonl, -1, 1);
  ASSERT_EQ(r.claims.size(), 1u);
  EXPECT_EQ(r.unmappable, 1);
  EXPECT_EQ(r.claims[0].gold_verdict, Verdict::kRefuted);
  EXPECT_THROW(ParseDatasetFormat("csv"), Error);
}

TEST(ManifestTest, RoundTrip) {
  TempDir dir;
  RunManifest m;
  m.run_name = "r";
  m.seed = 9;
  m.config = {{"seed", 9}};
  m.config_digest = "abc";
  m.model_pool = {"a", "b"};
  m.claim_source_digests = {{"d.json", "ff"}};
  m.phases = {{"run", true}};
  std::filesystem::path path = ManifestPath(dir / "pool.jsonl");
  EXPECT_EQ(path.filename(), "pool.jsonl.manifest.json");
  EXPECT_FALSE(ReadManifest(path).has_value());
  WriteManifest(path, m);
  auto back = ReadManifest(path);
  ASSERT_TRUE(back);
  EXPECT_EQ(back->config_digest, "abc");
  EXPECT_EQ(back->model_pool, m.model_pool);
  EXPECT_TRUE(back->phases.at("run"));
}

TEST(FileTest, AtomicWrite) {
  TempDir dir;
  WriteFileAtomic(dir / "sub" / "f.txt", "one");
  WriteFileAtomic(dir / "sub" / "f.txt", "two");
  EXPECT_EQ(ReadFile(dir / "sub" / "f.txt"), "two");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir / "sub")) {
    ++files;
  }
  EXPECT_EQ(files, 1);
}

}  // namespace
}  // namespace factarena

#include <gtest/gtest.h>

#include <sstream>

#include "litrev/dataset.hpp"
#include "litrev/error.hpp"
#include "test_support.hpp"

using namespace litrev;
using namespace litrev::testkit;

namespace {

DatasetSplit parse(const std::string& text, std::string_view split = "test") {
  std::istringstream in(text);
  return parse_jsonl_split(in, split);
}

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error raised";
  return ErrorKind::invalid_argument;
}

}  // namespace

TEST(Dataset, RecordEchoesSchema) {
  auto split = parse(R"({"paper_id":"p1","source":["s1","s2"],"target":["t1"]})" "\n");
  ASSERT_EQ(split.records.size(), 1u);
  EXPECT_EQ(split.records[0].paper_id, "p1");
  EXPECT_EQ(split.records[0].source, (std::vector<std::string>{"s1", "s2"}));
  EXPECT_EQ(split.records[0].targets, std::vector<std::string>{"t1"});
  EXPECT_EQ(split.name, "test");
}

TEST(Dataset, ScalarTargetBecomesList) {
  auto split = parse(R"({"paper_id":"p2","source":["s"],"target":"t"})");
  EXPECT_EQ(split.records[0].targets, std::vector<std::string>{"t"});
}

TEST(Dataset, EmptySourceIsSchemaError) {
  EXPECT_EQ(kind_of([] { parse(R"({"paper_id":"p3","source":[],"target":["t"]})"); }), ErrorKind::schema);
}

TEST(Dataset, EmptyTargetsAreSchemaErrors) {
  EXPECT_EQ(kind_of([] { parse(R"({"paper_id":"p","source":["s"],"target":[]})"); }), ErrorKind::schema);
  EXPECT_EQ(kind_of([] { parse(R"({"paper_id":"p","source":["s"],"target":[""]})"); }), ErrorKind::schema);
}

TEST(Dataset, MissingPaperIdIsGenerated) {
  auto split = parse("{\"source\":[\"a\"],\"target\":\"b\"}\n{\"source\":[\"c\"],\"target\":\"d\"}\n");
  EXPECT_EQ(split.records[0].paper_id, "line-1");
  EXPECT_EQ(split.records[1].paper_id, "line-2");
}

TEST(Dataset, InvalidLinesAreReportedTogether) {
  try {
    load_jsonl_split(fixture_path("dataset/bad_lines.jsonl"), "test");
    FAIL() << "expected a schema error";
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::schema);
    std::string msg = e.what();
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("line 1:"), std::string::npos) << msg;
    EXPECT_EQ(msg.find("line 4"), std::string::npos) << msg;
  }
}

TEST(Dataset, EmptyFileMissingFileDuplicatesAndBadSplit) {
  EXPECT_EQ(kind_of([] { parse(""); }), ErrorKind::schema);
  EXPECT_EQ(kind_of([] { parse("\n  \n"); }), ErrorKind::schema);
  EXPECT_EQ(kind_of([] { load_jsonl_split("/nonexistent/split.jsonl", "test"); }), ErrorKind::io);
  EXPECT_EQ(kind_of([] {
              parse("{\"paper_id\":\"x\",\"source\":[\"a\"],\"target\":\"b\"}\n"
                    "{\"paper_id\":\"x\",\"source\":[\"c\"],\"target\":\"d\"}\n");
            }),
            ErrorKind::schema);
  EXPECT_EQ(kind_of([] { parse(R"({"source":["a"],"target":"b"})", "dev"); }), ErrorKind::invalid_argument);
}

TEST(Dataset, ExtraFieldsArePreservedAndOrderKept) {
  auto split = load_jsonl_split(fixture_path("dataset/scitldr_sample.jsonl"), "test");
  ASSERT_EQ(split.records.size(), 3u);
  EXPECT_EQ(split.records[0].paper_id, "synth-gnn-001");
  EXPECT_EQ(split.records[1].paper_id, "synth-rl-002");
  EXPECT_EQ(split.records[2].paper_id, "synth-lm-003");
  EXPECT_TRUE(split.records[0].extra_fields.contains("source_labels"));
  EXPECT_TRUE(split.records[0].extra_fields.contains("title"));
  EXPECT_FALSE(split.records[0].extra_fields.contains("source"));
  EXPECT_EQ(split.records[2].targets.size(), 3u);
}

TEST(Dataset, RoundTrip) {
  auto split = load_jsonl_split(fixture_path("dataset/scitldr_sample.jsonl"), "test");
  std::stringstream buffer;
  write_jsonl_split(buffer, split);
  auto again = parse_jsonl_split(buffer, "test");
  EXPECT_EQ(again.records, split.records);
}

TEST(Dataset, AicSourceText) {
  TldrRecord r;
  r.source = {"a.", "b."};
  EXPECT_EQ(aic_source_text(r), "a. b.");
  r.source = {"only."};
  EXPECT_EQ(aic_source_text(r), "only.");

  auto split = load_jsonl_split(fixture_path("dataset/scitldr_sample.jsonl"), "test");
  std::string joined;
  for (const auto& rec : split.records) joined += aic_source_text(rec) + "\n";
  EXPECT_EQ(joined, read_text(fixture_path("dataset/scitldr_sample.aic.golden.txt")));
}

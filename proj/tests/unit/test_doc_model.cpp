#include <doctest.h>

#include "fdr/doc_model.hpp"
#include "test_util.hpp"

using namespace fdr;

TEST_CASE("corpus: three valid lines load in order") {
  auto r = parse_corpus(
      "{\"id\":\"a\",\"ground_truth\":\"x\"}\n"
      "{\"id\":\"b\",\"ground_truth\":\"y\",\"prediction\":\"y\"}\n"
      "{\"id\":\"c\",\"ground_truth\":\"z\",\"language\":\"zh\",\"doc_type\":\"academic\"}\n");
  REQUIRE(r.samples.size() == 3);
  CHECK(r.samples[0].id == "a");
  CHECK(r.samples[1].prediction == std::optional<std::string>("y"));
  CHECK(r.samples[2].language == Language::Zh);
  CHECK(r.samples[2].doc_type == std::optional<std::string>("academic"));
  CHECK(r.skipped_lines.empty());
}

TEST_CASE("corpus: positive logprob is a schema error") {
  try {
    parse_corpus("{\"id\":\"a\",\"ground_truth\":\"x\",\"token_logprobs\":[-0.1,0.5]}\n");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Schema);
    CHECK(std::string(e.what()).find("logprob > 0") != std::string::npos);
  }
}

TEST_CASE("corpus: lenient mode skips malformed lines") {
  auto r = parse_corpus("{\"id\":\"a\",\"ground_truth\":\"x\"}\nnot json\n{\"id\":\"b\",\"ground_truth\":\"y\"}\n",
                        false);
  CHECK(r.samples.size() == 2);
  CHECK(r.skipped_lines.size() == 1);
  CHECK_THROWS_AS(parse_corpus("{\"id\":\"a\",\"ground_truth\":\"x\"}\nnot json\n"), Error);
}

TEST_CASE("corpus: duplicate ids are rejected in both modes") {
  const char* text = "{\"id\":\"a\",\"ground_truth\":\"x\"}\n{\"id\":\"a\",\"ground_truth\":\"y\"}\n";
  CHECK_THROWS_WITH(parse_corpus(text), doctest::Contains("DuplicateId"));
  CHECK_THROWS_WITH(parse_corpus(text, false), doctest::Contains("DuplicateId"));
}

TEST_CASE("corpus: field validation") {
  CHECK_THROWS_AS(parse_corpus("{\"ground_truth\":\"x\"}\n"), Error);
  CHECK_THROWS_AS(parse_corpus("{\"id\":\"\",\"ground_truth\":\"x\"}\n"), Error);
  CHECK_THROWS_AS(parse_corpus("{\"id\":\"a\"}\n"), Error);
  CHECK_THROWS_AS(parse_corpus("{\"id\":\"a\",\"ground_truth\":\"x\",\"language\":\"fr\"}\n"), Error);
  CHECK_THROWS_AS(parse_corpus("[1,2]\n"), Error);
}

TEST_CASE("records: unknown keys survive a round trip") {
  auto r = parse_corpus("{\"id\":\"a\",\"ground_truth\":\"x\",\"zeta\":1,\"alpha\":{\"k\":[1]}}\n");
  REQUIRE(r.samples.size() == 1);
  const std::string line = dump_line(to_json(r.samples[0]));
  CHECK(line == "{\"id\":\"a\",\"ground_truth\":\"x\",\"zeta\":1,\"alpha\":{\"k\":[1]}}");
  CHECK(sample_from_json(to_json(r.samples[0])) == r.samples[0]);
}

TEST_CASE("records: typed round trips") {
  RewardRecord rr{"x", RewardBreakdown{0.5, std::nullopt, 1.0, 2, 0.75}, std::nullopt};
  CHECK(reward_record_from_json(to_json(rr)) == rr);
  RewardRecord err{"y", std::nullopt, std::string("EmptyGroundTruth")};
  CHECK(reward_record_from_json(to_json(err)) == err);
  GroupRollout g{"p", {1.0, 0.0}, {1.0, -1.0}};
  CHECK(group_rollout_from_json(to_json(g)) == g);
  EntropyRecord e{"s", 3, 0.4};
  CHECK(entropy_record_from_json(to_json(e)) == e);
}

TEST_CASE("write_records: empty input gives an empty file, reruns are byte-identical") {
  testutil::TempDir dir;
  write_records(dir / "empty.jsonl", std::vector<GroupRollout>{});
  CHECK(read_file(dir / "empty.jsonl").empty());
  std::vector<GroupRollout> rows{{"a", {0.1, 0.2}, {-1.0, 1.0}}, {"b", {1.0 / 3.0}, {0.0}}};
  write_records(dir / "one.jsonl", rows);
  write_records(dir / "two.jsonl", rows);
  CHECK(read_file(dir / "one.jsonl") == read_file(dir / "two.jsonl"));
}

TEST_CASE("read_file: missing path is an I/O error") {
  try {
    read_file("/nonexistent/definitely/missing.jsonl");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Io);
  }
}

#pragma once

// Core record types and their JSONL persistence.
//
// Corpus line schema (keys written in this order, unknown keys appended after):
//   {"id": str, "ground_truth": str, "prediction": str?,
//    "token_logprobs": [float]?, "language": "en"|"zh"|"other"?, "doc_type": str?}
//
// token_logprobs are natural-log probabilities (nats), one per generated token.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "fdr/error.hpp"

namespace fdr {

using ordered_json = nlohmann::ordered_json;

enum class Language { En, Zh, Other };

std::string_view to_string(Language lang) noexcept;
std::optional<Language> parse_language(std::string_view tag) noexcept;

struct Sample {
  std::string id;
  std::string ground_truth;
  std::optional<std::string> prediction;
  std::optional<std::vector<double>> token_logprobs;
  std::optional<Language> language;
  std::optional<std::string> doc_type;
  // Keys not part of the schema, kept verbatim so they survive a round trip.
  ordered_json extra = ordered_json::object();

  bool operator==(const Sample&) const = default;
};

enum class SegmentKind { PlainText, Formula, Table };

std::string_view to_string(SegmentKind kind) noexcept;

// Half-open byte range [start, end) into the source document.
struct ByteSpan {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t size() const noexcept { return end - start; }
  bool operator==(const ByteSpan&) const = default;
};

struct Segment {
  SegmentKind kind = SegmentKind::PlainText;
  // Formula: delimiters stripped. Table: raw markup. PlainText: raw bytes.
  std::string content;
  // Raw range, delimiters included.
  ByteSpan span;

  bool operator==(const Segment&) const = default;
};

struct SegmentedDoc {
  std::string source;
  std::vector<Segment> segments;
};

struct RewardBreakdown {
  std::optional<double> text_score;
  std::optional<double> formula_score;
  std::optional<double> table_score;
  int present_types = 0;
  double composite = 0.0;

  bool operator==(const RewardBreakdown&) const = default;
};

// One line of reward output. Exactly one of `breakdown` / `error` is set.
struct RewardRecord {
  std::string id;
  std::optional<RewardBreakdown> breakdown;
  std::optional<std::string> error;

  bool operator==(const RewardRecord&) const = default;
};

struct GroupRollout {
  std::string prompt_id;
  std::vector<double> rewards;
  std::vector<double> advantages;

  bool operator==(const GroupRollout&) const = default;
};

struct EntropyRecord {
  std::string sample_id;
  std::size_t token_count = 0;
  double mean_entropy = 0.0;

  bool operator==(const EntropyRecord&) const = default;
};

// JSON mapping. `*_from_json` throw Error{Schema} with a reason on violation.
ordered_json to_json(const Sample& s);
ordered_json to_json(const RewardRecord& r);
ordered_json to_json(const GroupRollout& g);
ordered_json to_json(const EntropyRecord& e);
ordered_json to_json(const Segment& s);

Sample sample_from_json(const ordered_json& j);
RewardRecord reward_record_from_json(const ordered_json& j);
GroupRollout group_rollout_from_json(const ordered_json& j);
EntropyRecord entropy_record_from_json(const ordered_json& j);

struct CorpusReadResult {
  std::vector<Sample> samples;
  // 1-based line numbers of lines skipped in lenient mode.
  std::vector<std::size_t> skipped_lines;
};

// Reads a JSONL corpus. Strict mode throws Error{Schema} naming the offending
// line; lenient mode skips and records it. Duplicate ids always throw.
CorpusReadResult read_corpus(const std::filesystem::path& path, bool strict = true);

// Parses a corpus from in-memory JSONL text, same rules as read_corpus.
CorpusReadResult parse_corpus(std::string_view text, bool strict = true);

// Reads every non-blank line of a JSONL file as a JSON value.
std::vector<ordered_json> read_jsonl(const std::filesystem::path& path);

void write_jsonl(const std::filesystem::path& path, std::span<const ordered_json> lines);

template <class Record>
void write_records(const std::filesystem::path& path, std::span<const Record> records) {
  std::vector<ordered_json> lines;
  lines.reserve(records.size());
  for (const auto& r : records) lines.push_back(to_json(r));
  write_jsonl(path, lines);
}

template <class Record>
void write_records(const std::filesystem::path& path, const std::vector<Record>& records) {
  write_records(path, std::span<const Record>(records));
}

// One JSON value per line, compact, no trailing spaces.
std::string dump_line(const ordered_json& j);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view data);

}  // namespace fdr

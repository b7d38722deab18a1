#include "fdr/doc_model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace fdr {

namespace {

Error schema(const std::string& reason) { return Error(ErrorCode::Schema, reason); }

const std::string& require_string(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw schema(std::string("missing \"") + key + "\"");
  if (!it->is_string()) throw schema(std::string("\"") + key + "\" must be a string");
  return it->get_ref<const std::string&>();
}

std::optional<std::string> optional_string(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_string()) throw schema(std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

std::optional<double> optional_number(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw schema(std::string("\"") + key + "\" must be a number");
  return it->get<double>();
}

std::vector<double> number_array(const ordered_json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) throw schema(std::string("\"") + key + "\" must be an array");
  std::vector<double> out;
  out.reserve(it->size());
  for (const auto& v : *it) {
    if (!v.is_number()) throw schema(std::string("\"") + key + "\" must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void put_optional(ordered_json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
}

}  // namespace

std::string_view to_string(Language lang) noexcept {
  switch (lang) {
    case Language::En: return "en";
    case Language::Zh: return "zh";
    case Language::Other: return "other";
  }
  return "other";
}

std::optional<Language> parse_language(std::string_view tag) noexcept {
  if (tag == "en") return Language::En;
  if (tag == "zh") return Language::Zh;
  if (tag == "other") return Language::Other;
  return std::nullopt;
}

std::string_view to_string(SegmentKind kind) noexcept {
  switch (kind) {
    case SegmentKind::PlainText: return "text";
    case SegmentKind::Formula: return "formula";
    case SegmentKind::Table: return "table";
  }
  return "text";
}

ordered_json to_json(const Sample& s) {
  ordered_json j = ordered_json::object();
  j["id"] = s.id;
  j["ground_truth"] = s.ground_truth;
  if (s.prediction) j["prediction"] = *s.prediction;
  if (s.token_logprobs) j["token_logprobs"] = *s.token_logprobs;
  if (s.language) j["language"] = std::string(to_string(*s.language));
  if (s.doc_type) j["doc_type"] = *s.doc_type;
  for (const auto& [k, v] : s.extra.items()) j[k] = v;
  return j;
}

Sample sample_from_json(const ordered_json& j) {
  if (!j.is_object()) throw schema("line is not a JSON object");
  Sample s;
  s.id = require_string(j, "id");
  if (s.id.empty()) throw schema("\"id\" must be non-empty");
  s.ground_truth = require_string(j, "ground_truth");
  s.prediction = optional_string(j, "prediction");
  if (auto it = j.find("token_logprobs"); it != j.end() && !it->is_null()) {
    auto lp = number_array(j, "token_logprobs");
    for (double v : lp) {
      if (!std::isfinite(v)) throw schema("token_logprobs: non-finite logprob");
      if (v > 0.0) throw schema("token_logprobs: logprob > 0");
    }
    s.token_logprobs = std::move(lp);
  }
  if (auto tag = optional_string(j, "language")) {
    auto lang = parse_language(*tag);
    if (!lang) throw schema("\"language\" must be one of en, zh, other");
    s.language = *lang;
  }
  s.doc_type = optional_string(j, "doc_type");
  for (const auto& [k, v] : j.items()) {
    if (k == "id" || k == "ground_truth" || k == "prediction" || k == "token_logprobs" ||
        k == "language" || k == "doc_type")
      continue;
    s.extra[k] = v;
  }
  return s;
}

ordered_json to_json(const RewardRecord& r) {
  ordered_json j = ordered_json::object();
  j["id"] = r.id;
  if (r.breakdown) {
    put_optional(j, "text", r.breakdown->text_score);
    put_optional(j, "formula", r.breakdown->formula_score);
    put_optional(j, "table", r.breakdown->table_score);
    j["composite"] = r.breakdown->composite;
  }
  if (r.error) j["error"] = *r.error;
  return j;
}

RewardRecord reward_record_from_json(const ordered_json& j) {
  if (!j.is_object()) throw schema("reward record is not a JSON object");
  RewardRecord r;
  r.id = require_string(j, "id");
  r.error = optional_string(j, "error");
  if (j.contains("composite")) {
    RewardBreakdown b;
    b.text_score = optional_number(j, "text");
    b.formula_score = optional_number(j, "formula");
    b.table_score = optional_number(j, "table");
    b.present_types = int(b.text_score.has_value()) + int(b.formula_score.has_value()) +
                      int(b.table_score.has_value());
    b.composite = *optional_number(j, "composite");
    r.breakdown = b;
  }
  if (r.breakdown.has_value() == r.error.has_value())
    throw schema("reward record needs exactly one of \"composite\" or \"error\"");
  return r;
}

ordered_json to_json(const GroupRollout& g) {
  ordered_json j = ordered_json::object();
  j["prompt_id"] = g.prompt_id;
  j["rewards"] = g.rewards;
  j["advantages"] = g.advantages;
  return j;
}

GroupRollout group_rollout_from_json(const ordered_json& j) {
  if (!j.is_object()) throw schema("group record is not a JSON object");
  GroupRollout g;
  g.prompt_id = require_string(j, "prompt_id");
  g.rewards = number_array(j, "rewards");
  if (j.contains("advantages")) g.advantages = number_array(j, "advantages");
  return g;
}

ordered_json to_json(const EntropyRecord& e) {
  ordered_json j = ordered_json::object();
  j["sample_id"] = e.sample_id;
  j["token_count"] = e.token_count;
  j["mean_entropy"] = e.mean_entropy;
  return j;
}

EntropyRecord entropy_record_from_json(const ordered_json& j) {
  if (!j.is_object()) throw schema("entropy record is not a JSON object");
  EntropyRecord e;
  e.sample_id = require_string(j, "sample_id");
  auto it = j.find("token_count");
  if (it == j.end() || !it->is_number_unsigned() || it->get<std::size_t>() == 0)
    throw schema("\"token_count\" must be a positive integer");
  e.token_count = it->get<std::size_t>();
  auto m = optional_number(j, "mean_entropy");
  if (!m || *m < 0.0) throw schema("\"mean_entropy\" must be a non-negative number");
  e.mean_entropy = *m;
  return e;
}

ordered_json to_json(const Segment& s) {
  ordered_json j = ordered_json::object();
  j["kind"] = std::string(to_string(s.kind));
  j["content"] = s.content;
  j["span"] = {s.span.start, s.span.end};
  return j;
}

CorpusReadResult parse_corpus(std::string_view text, bool strict) {
  CorpusReadResult out;
  std::unordered_set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.find_first_not_of(" \t") == std::string_view::npos) continue;

    Sample s;
    try {
      s = sample_from_json(ordered_json::parse(line));
    } catch (const std::exception& e) {
      if (strict) {
        throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": " + e.what());
      }
      out.skipped_lines.push_back(line_no);
      continue;
    }
    if (!seen.insert(s.id).second) {
      throw Error(ErrorCode::Schema, "line " + std::to_string(line_no) + ": DuplicateId(" + s.id + ")");
    }
    out.samples.push_back(std::move(s));
  }
  return out;
}

CorpusReadResult read_corpus(const std::filesystem::path& path, bool strict) {
  return parse_corpus(read_file(path), strict);
}

std::vector<ordered_json> read_jsonl(const std::filesystem::path& path) {
  std::string text = read_file(path);
  std::vector<ordered_json> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(ordered_json::parse(line));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::Schema, path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

std::string dump_line(const ordered_json& j) {
  return j.dump(-1, ' ', false, ordered_json::error_handler_t::strict);
}

void write_jsonl(const std::filesystem::path& path, std::span<const ordered_json> lines) {
  std::string buf;
  for (const auto& j : lines) {
    buf += dump_line(j);
    buf += '\n';
  }
  write_file(path, buf);
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) throw Error(ErrorCode::Io, "read failed: " + path.string());
  return std::move(ss).str();
}

void write_file(const std::filesystem::path& path, std::string_view data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open for writing: " + path.string());
  out.write(data.data(), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(ErrorCode::Io, "write failed: " + path.string());
}

}  // namespace fdr

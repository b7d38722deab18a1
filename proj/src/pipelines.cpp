#include "fdr/pipelines.hpp"

#include "fdr/segmenter.hpp"
#include "fdr/version.hpp"

namespace fdr {

namespace {

void require_predictions(std::span<const Sample> corpus) {
  std::string missing;
  for (const auto& s : corpus) {
    if (s.prediction) continue;
    if (!missing.empty()) missing += ", ";
    missing += s.id;
  }
  if (!missing.empty()) throw Error(ErrorCode::Schema, "MissingPrediction(" + missing + ")");
}

void write_json_file(const path& p, const ordered_json& j) { write_file(p, j.dump(2) + "\n"); }

}  // namespace

path sidecar_path(const path& output, const path& explicit_path, const char* suffix) {
  if (!explicit_path.empty()) return explicit_path;
  path p = output;
  p += suffix;
  return p;
}

void run_segment(const path& input, const path& output) {
  const auto corpus = read_corpus(input).samples;
  std::vector<ordered_json> lines;
  lines.reserve(corpus.size());
  for (const auto& s : corpus) {
    ordered_json j = ordered_json::object();
    j["id"] = s.id;
    j["segments"] = ordered_json::array();
    for (const auto& seg : segment(s.ground_truth).segments) j["segments"].push_back(to_json(seg));
    lines.push_back(std::move(j));
  }
  write_jsonl(output, lines);
}

ordered_json run_reward(const path& input, const path& output, const RewardConfig& cfg, unsigned workers,
                        const path& summary) {
  const auto corpus = read_corpus(input).samples;
  require_predictions(corpus);
  std::vector<RewardPair> pairs;
  pairs.reserve(corpus.size());
  for (const auto& s : corpus) pairs.push_back({*s.prediction, s.ground_truth});
  const auto outcomes = batch_reward(pairs, cfg, workers);

  std::vector<RewardRecord> records;
  records.reserve(corpus.size());
  double composite = 0.0, text = 0.0, formula = 0.0, table = 0.0;
  std::size_t scored = 0, n_text = 0, n_formula = 0, n_table = 0;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    records.push_back(RewardRecord{corpus[i].id, outcomes[i].breakdown, outcomes[i].error});
    if (!outcomes[i].breakdown) continue;
    const auto& b = *outcomes[i].breakdown;
    ++scored;
    composite += b.composite;
    if (b.text_score) text += *b.text_score, ++n_text;
    if (b.formula_score) formula += *b.formula_score, ++n_formula;
    if (b.table_score) table += *b.table_score, ++n_table;
  }
  write_records(output, records);

  auto mean = [](double sum, std::size_t n) -> ordered_json {
    if (n == 0) return nullptr;
    return sum / static_cast<double>(n);
  };
  ordered_json s = ordered_json::object();
  s["build"] = kBuildId;
  s["samples"] = corpus.size();
  s["scored"] = scored;
  s["errors"] = corpus.size() - scored;
  s["mean_composite"] = mean(composite, scored);
  s["mean_text"] = mean(text, n_text);
  s["mean_formula"] = mean(formula, n_formula);
  s["mean_table"] = mean(table, n_table);
  s["text_samples"] = n_text;
  s["formula_samples"] = n_formula;
  s["table_samples"] = n_table;
  s["config"] = {{"format_separation", cfg.enable_format_separation},
                 {"formula_reward", cfg.enable_formula_reward},
                 {"table_reward", cfg.enable_table_reward}};
  write_json_file(sidecar_path(output, summary, kRewardSummarySuffix), s);
  return s;
}

ordered_json run_filter(const path& input, const path& output, const FiltrationConfig& cfg, const path& report) {
  validate(cfg);
  const auto corpus = read_corpus(input).samples;
  auto result = run_curation(corpus, cfg);
  write_records(output, result.kept);
  write_json_file(sidecar_path(output, report, kFilterReportSuffix), result.report);
  return result.report;
}

BenchReport run_bench(const path& input, const path& output, const RewardConfig& cfg, const BenchPaths& paths,
                      unsigned workers) {
  const auto corpus = read_corpus(input).samples;
  std::optional<FormulaScoreMap> external;
  if (!paths.formula_scores.empty()) external = read_formula_scores(paths.formula_scores);
  BenchReport report = evaluate_corpus(corpus, cfg, external ? &*external : nullptr, workers);

  std::vector<ordered_json> lines{to_json(report.overall)};
  for (const auto& row : report.by_doc_type) lines.push_back(to_json(row));
  write_jsonl(output, lines);
  write_file(sidecar_path(output, paths.table, kBenchTableSuffix), format_bench_table(report));
  if (!paths.per_sample.empty()) write_records(paths.per_sample, report.samples);
  return report;
}

std::vector<RowCheck> run_bench_rows(const path& input, const path& output, const path& table) {
  std::vector<ResultRow> rows;
  for (const auto& j : read_jsonl(input)) rows.push_back(result_row_from_json(j));
  auto checks = score_table_rows(rows);
  write_records(output, checks);
  write_file(sidecar_path(output, table, kBenchTableSuffix), format_row_checks(checks));
  return checks;
}

std::vector<GroupRollout> run_advantages(const path& input, const path& output, const GrpoConfig& cfg) {
  validate(cfg);
  std::vector<GroupRollout> out;
  const auto lines = read_jsonl(input);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto& j = lines[i];
    GroupRollout g;
    const ordered_json* rewards = &j;
    if (j.is_object()) {
      if (!j.contains("prompt_id") || !j["prompt_id"].is_string() || !j.contains("rewards"))
        throw Error(ErrorCode::Schema, "group " + std::to_string(i) + ": expected {\"prompt_id\", \"rewards\"}");
      g.prompt_id = j["prompt_id"].get<std::string>();
      rewards = &j["rewards"];
    } else {
      g.prompt_id = std::to_string(i);
    }
    if (!rewards->is_array() || rewards->empty())
      throw Error(ErrorCode::Schema, "group " + std::to_string(i) + ": rewards must be a non-empty array");
    for (const auto& r : *rewards) {
      if (!r.is_number()) throw Error(ErrorCode::Schema, "group " + std::to_string(i) + ": rewards must be numbers");
      g.rewards.push_back(r.get<double>());
    }
    g.advantages = group_advantages(g.rewards, cfg);
    out.push_back(std::move(g));
  }
  write_records(output, out);
  return out;
}

}  // namespace fdr

#include "fdr/bench.hpp"

#include <cmath>
#include <cstdio>

#include "fdr/segmenter.hpp"
#include "fdr/version.hpp"
#include "parallel.hpp"

namespace fdr {

namespace {

void put(ordered_json& j, const char* key, const std::optional<double>& v) {
  if (v) j[key] = *v;
  else j[key] = nullptr;
}

std::string cell(const std::optional<double>& v, const char* fmt) {
  if (!v) return "-";
  char buf[32];
  std::snprintf(buf, sizeof buf, fmt, *v);
  return buf;
}

struct Mean {
  double sum = 0.0;
  std::size_t n = 0;
  void add(const std::optional<double>& v) {
    if (!v) return;
    sum += *v;
    ++n;
  }
  std::optional<double> value() const {
    if (n == 0) return std::nullopt;
    return sum / static_cast<double>(n);
  }
};

}  // namespace

double overall_score(double text_edit, double formula, double table_teds) {
  auto in = [](double v, double hi) { return std::isfinite(v) && v >= 0.0 && v <= hi; };
  if (!in(text_edit, 1.0) || !in(formula, 100.0) || !in(table_teds, 100.0))
    throw Error(ErrorCode::InvalidArgument, "RangeError: text_edit must lie in [0,1], formula and table in [0,100]");
  return ((1.0 - text_edit) * 100.0 + formula + table_teds) / 3.0;
}

SampleMetrics score_sample(const Sample& s, const RewardConfig& cfg, const FormulaScoreMap* external_formula) {
  if (!s.prediction) throw Error(ErrorCode::Schema, "MissingPrediction(" + s.id + ")");
  SampleMetrics m;
  m.id = s.id;
  m.doc_type = s.doc_type.value_or("unknown");
  const FormatStreams g = split_streams(segment(s.ground_truth), false, false);
  const FormatStreams p = split_streams(segment(*s.prediction), false, false);
  if (!is_blank(g.text)) m.text_edit = ned(p.text, g.text, cfg.text_norm);
  if (!g.formulas.empty()) {
    if (external_formula) {
      auto it = external_formula->find(s.id);
      if (it == external_formula->end())
        throw Error(ErrorCode::Schema, "external formula scores lack an entry for " + s.id);
      m.formula = it->second;
    } else {
      m.formula = 100.0 * formula_reward(p.formulas, g.formulas, cfg.canon_rules);
    }
  }
  if (!g.tables.empty()) {
    m.table_teds = 100.0 * table_reward(p.tables, g.tables, cfg.table, false);
    m.table_teds_s = 100.0 * table_reward(p.tables, g.tables, cfg.table, true);
  }
  return m;
}

BenchRow aggregate(std::string name, std::span<const SampleMetrics> samples, const std::string& label) {
  BenchRow row;
  row.name = std::move(name);
  row.samples = samples.size();
  row.formula_metric_label = label;
  Mean text, formula, teds, teds_s;
  for (const auto& m : samples) {
    text.add(m.text_edit);
    formula.add(m.formula);
    teds.add(m.table_teds);
    teds_s.add(m.table_teds_s);
  }
  row.text_samples = text.n;
  row.formula_samples = formula.n;
  row.table_samples = teds.n;
  row.text_edit = text.value();
  row.formula_score = formula.value();
  row.table_teds = teds.value();
  row.table_teds_s = teds_s.value();
  if (row.text_edit && row.formula_score && row.table_teds)
    row.overall = overall_score(*row.text_edit, *row.formula_score, *row.table_teds);
  return row;
}

BenchReport evaluate_corpus(std::span<const Sample> corpus, const RewardConfig& cfg,
                            const FormulaScoreMap* external_formula, unsigned workers) {
  std::string missing;
  for (const auto& s : corpus) {
    if (s.prediction) continue;
    if (!missing.empty()) missing += ", ";
    missing += s.id;
  }
  if (!missing.empty()) throw Error(ErrorCode::Schema, "MissingPrediction(" + missing + ")");
  if (external_formula) {
    for (const auto& [id, v] : *external_formula)
      if (!(v >= 0.0 && v <= 100.0))
        throw Error(ErrorCode::Schema, "external formula score for " + id + " outside [0,100]");
  }

  BenchReport report;
  report.samples.resize(corpus.size());
  std::vector<std::optional<std::string>> errors(corpus.size());
  detail::parallel_for(corpus.size(), workers, [&](std::size_t i) {
    try {
      report.samples[i] = score_sample(corpus[i], cfg, external_formula);
    } catch (const Error& e) {
      errors[i] = e.what();
    }
  });
  for (const auto& e : errors)
    if (e) throw Error(ErrorCode::Schema, *e);

  const std::string label = external_formula ? kFormulaExternalLabel : kFormulaProxyLabel;
  report.overall = aggregate("overall", report.samples, label);
  std::map<std::string, std::vector<SampleMetrics>> groups;
  for (const auto& m : report.samples) groups[m.doc_type].push_back(m);
  for (const auto& [doc_type, members] : groups) report.by_doc_type.push_back(aggregate(doc_type, members, label));
  return report;
}

FormulaScoreMap read_formula_scores(const std::filesystem::path& path) {
  FormulaScoreMap out;
  for (const auto& j : read_jsonl(path)) {
    if (!j.is_object() || !j.contains("id") || !j["id"].is_string() || !j.contains("formula") ||
        !j["formula"].is_number())
      throw Error(ErrorCode::Schema, "formula score lines need {\"id\": str, \"formula\": number}");
    out[j["id"].get<std::string>()] = j["formula"].get<double>();
  }
  return out;
}

std::string_view to_string(RowStatus s) noexcept {
  switch (s) {
    case RowStatus::Unchecked: return "unchecked";
    case RowStatus::Exact: return "exact";
    case RowStatus::WithinTolerance: return "within-tolerance";
    case RowStatus::RoundingArtifact: return "rounding-artifact";
    case RowStatus::ExceedsTolerance: return "exceeds-tolerance";
  }
  return "";
}

ResultRow result_row_from_json(const ordered_json& j) {
  auto number = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number())
      throw Error(ErrorCode::Schema, std::string("results row needs numeric \"") + key + "\"");
    return j[key].get<double>();
  };
  if (!j.is_object() || !j.contains("name") || !j["name"].is_string())
    throw Error(ErrorCode::Schema, "results row needs a string \"name\"");
  ResultRow r;
  r.name = j["name"].get<std::string>();
  r.text_edit = number("text_edit");
  r.formula = number("formula");
  r.table_teds = number("table_teds");
  if (j.contains("overall_printed") && !j["overall_printed"].is_null()) r.overall_printed = number("overall_printed");
  return r;
}

std::vector<RowCheck> score_table_rows(std::span<const ResultRow> rows, double tolerance, double rounding_bound) {
  std::vector<RowCheck> out;
  out.reserve(rows.size());
  for (const auto& row : rows) {
    RowCheck c;
    c.row = row;
    c.recomputed = overall_score(row.text_edit, row.formula, row.table_teds);
    if (row.overall_printed) {
      const double delta = c.recomputed - *row.overall_printed;
      const double mag = std::abs(delta);
      c.delta = delta;
      c.within_tolerance = mag <= tolerance + 1e-12;
      if (mag <= 0.005 + 1e-12) c.status = RowStatus::Exact;
      else if (mag <= rounding_bound + 1e-12) c.status = RowStatus::WithinTolerance;
      else if (c.within_tolerance) c.status = RowStatus::RoundingArtifact;
      else c.status = RowStatus::ExceedsTolerance;
      c.flagged = c.status != RowStatus::Exact;
      c.implied_text_edit = 1.0 - (3.0 * *row.overall_printed - row.formula - row.table_teds) / 100.0;
    }
    out.push_back(c);
  }
  return out;
}

ordered_json to_json(const BenchRow& row) {
  ordered_json j = ordered_json::object();
  j["build"] = kBuildId;
  j["name"] = row.name;
  j["samples"] = row.samples;
  put(j, "text_edit", row.text_edit);
  put(j, "formula", row.formula_score);
  put(j, "table_teds", row.table_teds);
  put(j, "table_teds_s", row.table_teds_s);
  put(j, "overall", row.overall);
  j["formula_metric"] = row.formula_metric_label;
  j["text_samples"] = row.text_samples;
  j["formula_samples"] = row.formula_samples;
  j["table_samples"] = row.table_samples;
  return j;
}

ordered_json to_json(const SampleMetrics& m) {
  ordered_json j = ordered_json::object();
  j["id"] = m.id;
  j["doc_type"] = m.doc_type;
  put(j, "text_edit", m.text_edit);
  put(j, "formula", m.formula);
  put(j, "table_teds", m.table_teds);
  put(j, "table_teds_s", m.table_teds_s);
  return j;
}

ordered_json to_json(const RowCheck& c) {
  ordered_json j = ordered_json::object();
  j["build"] = kBuildId;
  j["name"] = c.row.name;
  j["text_edit"] = c.row.text_edit;
  j["formula"] = c.row.formula;
  j["table_teds"] = c.row.table_teds;
  j["overall"] = c.recomputed;
  put(j, "overall_printed", c.row.overall_printed);
  put(j, "delta", c.delta);
  j["status"] = std::string(to_string(c.status));
  j["flagged"] = c.flagged;
  j["within_tolerance"] = c.within_tolerance;
  if (c.status == RowStatus::RoundingArtifact || c.status == RowStatus::ExceedsTolerance) {
    char note[160];
    std::snprintf(note, sizeof note,
                  "discrepancy exceeds the %.3f input-rounding bound; text_edit=%.4f would reproduce the printed value",
                  kInputRoundingBound, *c.implied_text_edit);
    j["note"] = note;
  }
  return j;
}

std::string format_bench_table(const BenchReport& report) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "# %s  formula metric: %s\n", kBuildId, report.overall.formula_metric_label.c_str());
  out += line;
  std::snprintf(line, sizeof line, "%-24s %7s %10s %9s %11s %13s %9s\n", "name", "samples", "text_edit", "formula",
                "table_teds", "table_teds_s", "overall");
  out += line;
  auto emit = [&](const BenchRow& r) {
    std::snprintf(line, sizeof line, "%-24s %7zu %10s %9s %11s %13s %9s\n", r.name.c_str(), r.samples,
                  cell(r.text_edit, "%.4f").c_str(), cell(r.formula_score, "%.2f").c_str(),
                  cell(r.table_teds, "%.2f").c_str(), cell(r.table_teds_s, "%.2f").c_str(),
                  cell(r.overall, "%.2f").c_str());
    out += line;
  };
  emit(report.overall);
  for (const auto& r : report.by_doc_type) emit(r);
  return out;
}

std::string format_row_checks(std::span<const RowCheck> checks) {
  std::string out;
  char line[256];
  std::snprintf(line, sizeof line, "# %s\n", kBuildId);
  out += line;
  std::snprintf(line, sizeof line, "%-20s %9s %8s %9s %9s %8s  %s\n", "name", "text_edit", "formula", "table", "overall",
                "printed", "status");
  out += line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-20s %9.3f %8.2f %9.2f %9.4f %8s  %s\n", c.row.name.c_str(), c.row.text_edit,
                  c.row.formula, c.row.table_teds, c.recomputed, cell(c.row.overall_printed, "%.2f").c_str(),
                  std::string(to_string(c.status)).c_str());
    out += line;
  }
  return out;
}

}  // namespace fdr

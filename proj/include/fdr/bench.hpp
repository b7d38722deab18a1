#pragma once

// Benchmark harness: per-sample text / formula / table metrics, per-doc-type
// aggregation and the overall document parsing score.

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fdr/doc_model.hpp"
#include "fdr/reward.hpp"

namespace fdr {

inline constexpr const char* kFormulaProxyLabel = "token-proxy";
inline constexpr const char* kFormulaExternalLabel = "external-CDM";

// ((1 - text_edit) * 100 + formula + table_teds) / 3. text_edit in [0, 1],
// the others in [0, 100]; throws Error{InvalidArgument} ("RangeError") otherwise.
double overall_score(double text_edit, double formula, double table_teds);

struct SampleMetrics {
  std::string id;
  std::string doc_type;
  std::optional<double> text_edit;     // [0, 1]
  std::optional<double> formula;       // [0, 100]
  std::optional<double> table_teds;    // [0, 100]
  std::optional<double> table_teds_s;  // [0, 100]
};

// A component is averaged over the samples whose ground truth contains it.
// `overall` is only defined when all three components are.
struct BenchRow {
  std::string name;
  std::size_t samples = 0;
  std::size_t text_samples = 0;
  std::size_t formula_samples = 0;
  std::size_t table_samples = 0;
  std::optional<double> text_edit;
  std::optional<double> formula_score;
  std::optional<double> table_teds;
  std::optional<double> table_teds_s;
  std::optional<double> overall;
  std::string formula_metric_label = kFormulaProxyLabel;
};

struct BenchReport {
  BenchRow overall;
  std::vector<BenchRow> by_doc_type;  // sorted by doc_type
  std::vector<SampleMetrics> samples;
};

using FormulaScoreMap = std::map<std::string, double>;

// Every sample needs a prediction (Error{Schema}, "MissingPrediction(ids)").
// With `external_formula`, every sample whose ground truth has formulas must
// have an entry, and the formula label reads kFormulaExternalLabel.
BenchReport evaluate_corpus(std::span<const Sample> corpus, const RewardConfig& cfg,
                            const FormulaScoreMap* external_formula = nullptr, unsigned workers = 1);

SampleMetrics score_sample(const Sample& s, const RewardConfig& cfg, const FormulaScoreMap* external_formula);

BenchRow aggregate(std::string name, std::span<const SampleMetrics> samples, const std::string& label);

// Reads {"id": str, "formula": float} lines.
FormulaScoreMap read_formula_scores(const std::filesystem::path& path);

// Printed results rows, e.g. one line of a leaderboard table.
struct ResultRow {
  std::string name;
  double text_edit = 0.0;
  double formula = 0.0;
  double table_teds = 0.0;
  std::optional<double> overall_printed;
};

enum class RowStatus {
  Unchecked,          // no printed value
  Exact,              // agrees at printed precision
  WithinTolerance,    // explained by rounding of the printed inputs
  RoundingArtifact,   // inside the tolerance but beyond what input rounding explains
  ExceedsTolerance,
};

std::string_view to_string(RowStatus s) noexcept;

struct RowCheck {
  ResultRow row;
  double recomputed = 0.0;
  std::optional<double> delta;  // recomputed - printed
  RowStatus status = RowStatus::Unchecked;
  bool flagged = false;
  bool within_tolerance = true;
  // text_edit that would reproduce the printed overall exactly.
  std::optional<double> implied_text_edit;
};

// Printed-value tolerance for recomputed overall scores.
inline constexpr double kRowTolerance = 0.05;
// Largest discrepancy that rounding alone explains when text_edit is printed
// at 3 decimals, formula and TEDS at 2, and the overall at 2:
// (100 * 0.0005 + 0.005 + 0.005) / 3 + 0.005.
inline constexpr double kInputRoundingBound = (100.0 * 0.0005 + 0.005 + 0.005) / 3.0 + 0.005;

ResultRow result_row_from_json(const ordered_json& j);
std::vector<RowCheck> score_table_rows(std::span<const ResultRow> rows, double tolerance = kRowTolerance,
                                       double rounding_bound = kInputRoundingBound);

ordered_json to_json(const BenchRow& row);
ordered_json to_json(const SampleMetrics& m);
ordered_json to_json(const RowCheck& c);

// Fixed-width text tables.
std::string format_bench_table(const BenchReport& report);
std::string format_row_checks(std::span<const RowCheck> checks);

}  // namespace fdr

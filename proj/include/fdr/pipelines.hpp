#pragma once

// File-level pipeline runs behind the CLI and the C API. Data goes to the
// output path; summaries and reports go to sidecar files. An empty sidecar
// path selects the default `<output><suffix>`.

#include <filesystem>
#include <optional>

#include "fdr/bench.hpp"
#include "fdr/curation.hpp"
#include "fdr/doc_model.hpp"
#include "fdr/reward.hpp"
#include "fdr/rl_math.hpp"

namespace fdr {

using std::filesystem::path;

inline constexpr const char* kRewardSummarySuffix = ".summary.json";
inline constexpr const char* kFilterReportSuffix = ".report.json";
inline constexpr const char* kBenchTableSuffix = ".txt";

path sidecar_path(const path& output, const path& explicit_path, const char* suffix);

// {"id", "segments": [...]} per sample.
void run_segment(const path& input, const path& output);

// RewardRecord JSONL plus a summary sidecar. Throws Error{Schema}
// ("MissingPrediction(ids)") when any sample lacks a prediction.
ordered_json run_reward(const path& input, const path& output, const RewardConfig& cfg, unsigned workers = 1,
                        const path& summary = {});

// Curated corpus JSONL plus the stage report sidecar.
ordered_json run_filter(const path& input, const path& output, const FiltrationConfig& cfg, const path& report = {});

struct BenchPaths {
  path formula_scores;  // optional external formula scores
  path table;           // text table sidecar
  path per_sample;      // optional per-sample metrics JSONL
};

// BenchRow JSONL (overall first, then per doc_type) plus a text table.
BenchReport run_bench(const path& input, const path& output, const RewardConfig& cfg, const BenchPaths& paths = {},
                      unsigned workers = 1);

// Rechecks printed result rows: RowCheck JSONL plus a text table.
std::vector<RowCheck> run_bench_rows(const path& input, const path& output, const path& table = {});

// Input lines are reward arrays or {"prompt_id", "rewards"}; arrays are
// numbered by line. GroupRollout JSONL out.
std::vector<GroupRollout> run_advantages(const path& input, const path& output, const GrpoConfig& cfg = {});

}  // namespace fdr

#pragma once

// Format-decoupled reward: every content type present in the ground truth is
// scored by its own metric, and the composite is the mean of those scores.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/doc_model.hpp"
#include "fdr/formula_metrics.hpp"
#include "fdr/table_metrics.hpp"
#include "fdr/text_metrics.hpp"

namespace fdr {

struct TypeWeights {
  double text = 1.0;
  double formula = 1.0;
  double table = 1.0;

  bool operator==(const TypeWeights&) const = default;
};

struct RewardConfig {
  // Off: both documents are scored whole by text_reward alone.
  bool enable_format_separation = true;
  // A disabled type is folded back into the plain-text stream on both sides.
  bool enable_formula_reward = true;
  bool enable_table_reward = true;
  TextNormConfig text_norm;
  CanonRuleSet canon_rules = CanonRuleSet::defaults();
  TableConfig table;
  TypeWeights weights;

  bool operator==(const RewardConfig&) const = default;
};

// Per-type content of one document after separation.
struct FormatStreams {
  std::string text;  // plain-text pieces joined by '\n'
  std::vector<std::string> formulas;
  std::vector<std::string> tables;
};

// Segments whose kind is folded contribute their raw source bytes (delimiters
// included) to `text` instead of their own stream.
FormatStreams split_streams(const SegmentedDoc& doc, bool fold_formulas, bool fold_tables);

// Throws Error{EmptyGroundTruth} when gt is empty.
RewardBreakdown format_decoupled_reward(std::string_view pred, std::string_view gt, const RewardConfig& cfg = {});

struct RewardPair {
  std::string_view prediction;
  std::string_view ground_truth;
};

struct RewardOutcome {
  std::optional<RewardBreakdown> breakdown;
  std::optional<std::string> error;
};

// Element-wise, order preserving. Per-element failures become error entries.
// workers == 0 picks the hardware concurrency.
std::vector<RewardOutcome> batch_reward(std::span<const RewardPair> pairs, const RewardConfig& cfg = {},
                                        unsigned workers = 1);

}  // namespace fdr

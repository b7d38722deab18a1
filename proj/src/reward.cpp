#include "fdr/reward.hpp"

#include "fdr/segmenter.hpp"
#include "parallel.hpp"

namespace fdr {

FormatStreams split_streams(const SegmentedDoc& doc, bool fold_formulas, bool fold_tables) {
  FormatStreams out;
  bool first_text = true;
  auto push_text = [&](std::string_view piece) {
    if (!first_text) out.text.push_back('\n');
    out.text.append(piece);
    first_text = false;
  };
  for (const auto& seg : doc.segments) {
    std::string_view raw = std::string_view(doc.source).substr(seg.span.start, seg.span.size());
    switch (seg.kind) {
      case SegmentKind::PlainText: push_text(seg.content); break;
      case SegmentKind::Formula:
        if (fold_formulas) push_text(raw);
        else out.formulas.push_back(seg.content);
        break;
      case SegmentKind::Table:
        if (fold_tables) push_text(raw);
        else out.tables.push_back(seg.content);
        break;
    }
  }
  return out;
}

RewardBreakdown format_decoupled_reward(std::string_view pred, std::string_view gt, const RewardConfig& cfg) {
  if (gt.empty()) throw Error(ErrorCode::EmptyGroundTruth, "EmptyGroundTruth: ground truth is empty");

  RewardBreakdown out;
  if (!cfg.enable_format_separation) {
    out.text_score = text_reward(pred, gt, cfg.text_norm);
    out.present_types = 1;
    out.composite = *out.text_score;
    return out;
  }

  const SegmentedDoc gt_doc = segment(gt);
  const SegmentedDoc pred_doc = segment(pred);
  const bool fold_formulas = !cfg.enable_formula_reward;
  const bool fold_tables = !cfg.enable_table_reward;
  const FormatStreams g = split_streams(gt_doc, fold_formulas, fold_tables);
  const FormatStreams p = split_streams(pred_doc, fold_formulas, fold_tables);

  double weighted = 0.0;
  double weight_sum = 0.0;
  auto take = [&](std::optional<double>& slot, double score, double weight) {
    slot = score;
    weighted += weight * score;
    weight_sum += weight;
    ++out.present_types;
  };

  if (!is_blank(g.text)) take(out.text_score, text_reward(p.text, g.text, cfg.text_norm), cfg.weights.text);
  if (!g.formulas.empty())
    take(out.formula_score, formula_reward(p.formulas, g.formulas, cfg.canon_rules), cfg.weights.formula);
  if (!g.tables.empty()) take(out.table_score, table_reward(p.tables, g.tables, cfg.table), cfg.weights.table);

  // A non-empty but all-whitespace ground truth has no scorable content; it is
  // matched against the prediction as plain text.
  if (out.present_types == 0) take(out.text_score, text_reward(p.text, g.text, cfg.text_norm), cfg.weights.text);

  out.composite = weighted / weight_sum;
  return out;
}

std::vector<RewardOutcome> batch_reward(std::span<const RewardPair> pairs, const RewardConfig& cfg,
                                        unsigned workers) {
  std::vector<RewardOutcome> out(pairs.size());
  detail::parallel_for(pairs.size(), workers, [&](std::size_t i) {
    try {
      out[i].breakdown = format_decoupled_reward(pairs[i].prediction, pairs[i].ground_truth, cfg);
    } catch (const Error& e) {
      out[i].error = e.what();
    }
  });
  return out;
}

}  // namespace fdr

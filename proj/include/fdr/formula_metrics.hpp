#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/doc_model.hpp"

namespace fdr {

// Each token is a control sequence (`\` + letters, or `\` + one other
// character), a bare `{` / `}`, or one non-whitespace character.
using LatexTokens = std::vector<std::string>;

LatexTokens tokenize_latex(std::string_view src);

enum class CanonRule {
  DropLeftRight,   // \left, \right
  FracVariants,    // \dfrac, \tfrac -> \frac
  DropSpacing,     // \, \; \! \: ~ \quad \qquad
  ArrayColspec,    // \begin{array}{...} -> \begin{array}
  UnwrapBraces,    // {x} -> x, to fixpoint
};

std::string_view to_string(CanonRule rule) noexcept;
std::optional<CanonRule> parse_canon_rule(std::string_view name) noexcept;

struct CanonRuleSet {
  std::vector<CanonRule> rules;

  static CanonRuleSet defaults();
  bool operator==(const CanonRuleSet&) const = default;
};

// Applies the rules in order, repeating the whole pass until nothing changes.
LatexTokens canonicalize(LatexTokens toks, const CanonRuleSet& rules);

// Sentence BLEU with clipped n-gram precisions for n = 1..min(max_n, |candidate|),
// uniform weights and brevity penalty. A precision with zero matches is
// replaced by 1 / (2 * candidate n-gram count). Empty candidate scores 0.
double bleu(const LatexTokens& candidate, const LatexTokens& reference, int max_n = 4);

// Inserted between consecutive formulas when streams are concatenated. Never
// produced by tokenize_latex.
inline constexpr std::string_view kFormulaSeparator = "<fsep>";

LatexTokens formula_stream(const std::vector<std::string>& formulas, const CanonRuleSet& rules);

// BLEU over the canonicalized, concatenated formula streams of each side.
double formula_reward(const std::vector<std::string>& pred_formulas,
                      const std::vector<std::string>& gt_formulas,
                      const CanonRuleSet& rules = CanonRuleSet::defaults());

double formula_reward(const std::vector<const Segment*>& pred_formulas,
                      const std::vector<const Segment*>& gt_formulas,
                      const CanonRuleSet& rules = CanonRuleSet::defaults());

}  // namespace fdr

#include "fdr/formula_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "fdr/utf8.hpp"

namespace fdr {

namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

std::size_t codepoint_len(std::string_view s, std::size_t i) {
  std::size_t len = utf8::sequence_length(s, i);
  return len == 0 ? 1 : len;
}

bool drop_tokens(LatexTokens& toks, std::initializer_list<std::string_view> victims) {
  auto it = std::remove_if(toks.begin(), toks.end(), [&](const std::string& t) {
    return std::find(victims.begin(), victims.end(), t) != victims.end();
  });
  bool changed = it != toks.end();
  toks.erase(it, toks.end());
  return changed;
}

bool rename_frac_variants(LatexTokens& toks) {
  bool changed = false;
  for (auto& t : toks) {
    if (t == "\\dfrac" || t == "\\tfrac") {
      t = "\\frac";
      changed = true;
    }
  }
  return changed;
}

bool is_colspec_token(const std::string& t) {
  return t == "l" || t == "c" || t == "r" || t == "|" || t == ":";
}

// \begin { a r r a y } { <colspec> }  ->  \begin { a r r a y }
bool strip_array_colspec(LatexTokens& toks) {
  static const LatexTokens kHead = {"\\begin", "{", "a", "r", "r", "a", "y", "}"};
  bool changed = false;
  for (std::size_t i = 0; i + kHead.size() < toks.size(); ++i) {
    if (!std::equal(kHead.begin(), kHead.end(), toks.begin() + static_cast<std::ptrdiff_t>(i))) continue;
    std::size_t open = i + kHead.size();
    if (toks[open] != "{") continue;
    std::size_t close = open + 1;
    while (close < toks.size() && is_colspec_token(toks[close])) ++close;
    if (close >= toks.size() || toks[close] != "}" || close == open + 1) continue;
    toks.erase(toks.begin() + static_cast<std::ptrdiff_t>(open), toks.begin() + static_cast<std::ptrdiff_t>(close + 1));
    changed = true;
  }
  return changed;
}

bool unwrap_single_token_groups(LatexTokens& toks) {
  bool changed = false;
  bool again = true;
  while (again) {
    again = false;
    LatexTokens out;
    out.reserve(toks.size());
    for (std::size_t i = 0; i < toks.size(); ++i) {
      if (i + 2 < toks.size() && toks[i] == "{" && toks[i + 2] == "}" && toks[i + 1] != "{" &&
          toks[i + 1] != "}") {
        out.push_back(toks[i + 1]);
        i += 2;
        again = true;
        continue;
      }
      out.push_back(std::move(toks[i]));
    }
    toks = std::move(out);
    changed = changed || again;
  }
  return changed;
}

bool apply(CanonRule rule, LatexTokens& toks) {
  switch (rule) {
    case CanonRule::DropLeftRight: return drop_tokens(toks, {"\\left", "\\right"});
    case CanonRule::FracVariants: return rename_frac_variants(toks);
    case CanonRule::DropSpacing:
      return drop_tokens(toks, {"\\,", "\\;", "\\!", "\\:", "~", "\\quad", "\\qquad"});
    case CanonRule::ArrayColspec: return strip_array_colspec(toks);
    case CanonRule::UnwrapBraces: return unwrap_single_token_groups(toks);
  }
  return false;
}

std::string ngram_key(const LatexTokens& toks, std::size_t start, std::size_t n) {
  std::string key;
  for (std::size_t k = start; k < start + n; ++k) {
    key += std::to_string(toks[k].size());
    key += ':';
    key += toks[k];
  }
  return key;
}

std::unordered_map<std::string, std::size_t> ngram_counts(const LatexTokens& toks, std::size_t n) {
  std::unordered_map<std::string, std::size_t> counts;
  if (toks.size() < n) return counts;
  for (std::size_t i = 0; i + n <= toks.size(); ++i) ++counts[ngram_key(toks, i, n)];
  return counts;
}

}  // namespace

LatexTokens tokenize_latex(std::string_view src) {
  LatexTokens out;
  std::size_t i = 0;
  while (i < src.size()) {
    char c = src[i];
    if (utf8::is_ascii_space(c)) {
      ++i;
      continue;
    }
    if (c == '\\') {
      if (i + 1 >= src.size()) {
        out.emplace_back("\\");
        break;
      }
      std::size_t j = i + 1;
      if (is_ascii_letter(src[j])) {
        while (j < src.size() && is_ascii_letter(src[j])) ++j;
      } else {
        j += codepoint_len(src, j);
      }
      out.emplace_back(src.substr(i, j - i));
      i = j;
      continue;
    }
    std::size_t len = codepoint_len(src, i);
    out.emplace_back(src.substr(i, len));
    i += len;
  }
  return out;
}

std::string_view to_string(CanonRule rule) noexcept {
  switch (rule) {
    case CanonRule::DropLeftRight: return "drop_left_right";
    case CanonRule::FracVariants: return "frac_variants";
    case CanonRule::DropSpacing: return "drop_spacing";
    case CanonRule::ArrayColspec: return "array_colspec";
    case CanonRule::UnwrapBraces: return "unwrap_braces";
  }
  return "";
}

std::optional<CanonRule> parse_canon_rule(std::string_view name) noexcept {
  for (CanonRule r : {CanonRule::DropLeftRight, CanonRule::FracVariants, CanonRule::DropSpacing,
                      CanonRule::ArrayColspec, CanonRule::UnwrapBraces}) {
    if (to_string(r) == name) return r;
  }
  return std::nullopt;
}

CanonRuleSet CanonRuleSet::defaults() {
  return {{CanonRule::DropLeftRight, CanonRule::FracVariants, CanonRule::DropSpacing,
           CanonRule::ArrayColspec, CanonRule::UnwrapBraces}};
}

LatexTokens canonicalize(LatexTokens toks, const CanonRuleSet& rules) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (CanonRule r : rules.rules) changed = apply(r, toks) || changed;
  }
  return toks;
}

double bleu(const LatexTokens& candidate, const LatexTokens& reference, int max_n) {
  if (max_n < 1) throw Error(ErrorCode::InvalidArgument, "bleu: max_n must be >= 1");
  if (candidate.empty()) return 0.0;
  const std::size_t c = candidate.size();
  const std::size_t r = reference.size();
  const std::size_t order = std::min<std::size_t>(static_cast<std::size_t>(max_n), c);

  double log_sum = 0.0;
  for (std::size_t n = 1; n <= order; ++n) {
    auto cand = ngram_counts(candidate, n);
    auto ref = ngram_counts(reference, n);
    std::size_t clipped = 0;
    for (const auto& [gram, count] : cand) {
      auto it = ref.find(gram);
      if (it != ref.end()) clipped += std::min(count, it->second);
    }
    const double total = static_cast<double>(c - n + 1);
    const double p = clipped > 0 ? static_cast<double>(clipped) / total : 1.0 / (2.0 * total);
    log_sum += std::log(p);
  }
  const double geo = std::exp(log_sum / static_cast<double>(order));
  const double bp = c < r ? std::exp(1.0 - static_cast<double>(r) / static_cast<double>(c)) : 1.0;
  return bp * geo;
}

LatexTokens formula_stream(const std::vector<std::string>& formulas, const CanonRuleSet& rules) {
  LatexTokens out;
  for (std::size_t i = 0; i < formulas.size(); ++i) {
    if (i > 0) out.emplace_back(kFormulaSeparator);
    LatexTokens toks = canonicalize(tokenize_latex(formulas[i]), rules);
    out.insert(out.end(), std::make_move_iterator(toks.begin()), std::make_move_iterator(toks.end()));
  }
  return out;
}

double formula_reward(const std::vector<std::string>& pred_formulas, const std::vector<std::string>& gt_formulas,
                      const CanonRuleSet& rules) {
  return bleu(formula_stream(pred_formulas, rules), formula_stream(gt_formulas, rules));
}

double formula_reward(const std::vector<const Segment*>& pred_formulas,
                      const std::vector<const Segment*>& gt_formulas, const CanonRuleSet& rules) {
  auto contents = [](const std::vector<const Segment*>& segs) {
    std::vector<std::string> out;
    out.reserve(segs.size());
    for (const Segment* s : segs) out.push_back(s->content);
    return out;
  };
  return formula_reward(contents(pred_formulas), contents(gt_formulas), rules);
}

}  // namespace fdr

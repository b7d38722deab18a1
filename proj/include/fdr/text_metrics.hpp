#pragma once

#include <cstddef>
#include <string>
#include <string_view>

namespace fdr {

struct TextNormConfig {
  bool unicode_nfc = true;
  // Runs of Unicode whitespace become one space; ends are trimmed.
  bool collapse_whitespace = true;
  bool case_fold = false;

  bool operator==(const TextNormConfig&) const = default;
};

// The identity profile: no normalization at all.
inline constexpr TextNormConfig kRawText{false, false, false};

// True when the string holds nothing but Unicode whitespace.
bool is_blank(std::string_view s);

std::u32string normalize_text(std::string_view s, const TextNormConfig& cfg);

// Unit-cost edit distance over Unicode scalar values.
std::size_t levenshtein(std::u32string_view a, std::u32string_view b);
std::size_t levenshtein(std::string_view a, std::string_view b);

// levenshtein / max length after normalization; 0 when both are empty.
double ned(std::string_view a, std::string_view b, const TextNormConfig& cfg = {});
double ned(std::u32string_view a, std::u32string_view b);

// 1 - ned. Inputs are the plain-text streams of each document.
double text_reward(std::string_view pred_text, std::string_view gt_text, const TextNormConfig& cfg = {});

}  // namespace fdr

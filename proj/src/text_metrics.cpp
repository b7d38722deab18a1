#include "fdr/text_metrics.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "fdr/utf8.hpp"

namespace fdr {

namespace {

std::u32string from_unicode_string(const icu::UnicodeString& u) {
  std::u32string out;
  out.reserve(static_cast<std::size_t>(u.length()));
  for (int32_t i = 0; i < u.length();) {
    UChar32 cp = u.char32At(i);
    out.push_back(static_cast<char32_t>(cp));
    i += U16_LENGTH(cp);
  }
  return out;
}

icu::UnicodeString to_unicode_string(std::u32string_view s) {
  icu::UnicodeString u;
  for (char32_t cp : s) u.append(static_cast<UChar32>(cp));
  return u;
}

}  // namespace

bool is_blank(std::string_view s) {
  for (char32_t cp : utf8::decode(s))
    if (!u_isUWhiteSpace(static_cast<UChar32>(cp))) return false;
  return true;
}

std::u32string normalize_text(std::string_view s, const TextNormConfig& cfg) {
  std::u32string text = utf8::decode(s);
  if (cfg.unicode_nfc || cfg.case_fold) {
    icu::UnicodeString u = to_unicode_string(text);
    if (cfg.case_fold) u.foldCase(U_FOLD_CASE_DEFAULT);
    if (cfg.unicode_nfc) {
      UErrorCode status = U_ZERO_ERROR;
      const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
      if (U_SUCCESS(status)) {
        icu::UnicodeString normalized = nfc->normalize(u, status);
        if (U_SUCCESS(status)) u = normalized;
      }
    }
    text = from_unicode_string(u);
  }
  if (cfg.collapse_whitespace) {
    std::u32string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char32_t cp : text) {
      if (u_isUWhiteSpace(static_cast<UChar32>(cp))) {
        pending_space = !out.empty();
        continue;
      }
      if (pending_space) out.push_back(U' ');
      pending_space = false;
      out.push_back(cp);
    }
    text = std::move(out);
  }
  return text;
}

std::size_t levenshtein(std::u32string_view a, std::u32string_view b) {
  // Common prefix/suffix never change the distance.
  while (!a.empty() && !b.empty() && a.front() == b.front()) {
    a.remove_prefix(1);
    b.remove_prefix(1);
  }
  while (!a.empty() && !b.empty() && a.back() == b.back()) {
    a.remove_suffix(1);
    b.remove_suffix(1);
  }
  if (a.size() < b.size()) std::swap(a, b);
  if (b.empty()) return a.size();

  std::vector<std::size_t> row(b.size() + 1);
  std::iota(row.begin(), row.end(), std::size_t{0});
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t up = row[j];
      std::size_t sub = diag + (a[i - 1] == b[j - 1] ? 0 : 1);
      row[j] = std::min({up + 1, row[j - 1] + 1, sub});
      diag = up;
    }
  }
  return row[b.size()];
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
  return levenshtein(std::u32string_view(utf8::decode(a)), std::u32string_view(utf8::decode(b)));
}

double ned(std::u32string_view a, std::u32string_view b) {
  std::size_t denom = std::max(a.size(), b.size());
  if (denom == 0) return 0.0;
  return static_cast<double>(levenshtein(a, b)) / static_cast<double>(denom);
}

double ned(std::string_view a, std::string_view b, const TextNormConfig& cfg) {
  std::u32string na = normalize_text(a, cfg);
  std::u32string nb = normalize_text(b, cfg);
  return ned(std::u32string_view(na), std::u32string_view(nb));
}

double text_reward(std::string_view pred_text, std::string_view gt_text, const TextNormConfig& cfg) {
  return 1.0 - ned(pred_text, gt_text, cfg);
}

}  // namespace fdr

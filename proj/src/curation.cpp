#include "fdr/curation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <limits>
#include <random>
#include <unordered_map>

#include "fdr/rl_math.hpp"
#include "fdr/segmenter.hpp"
#include "fdr/utf8.hpp"
#include "fdr/version.hpp"

namespace fdr {

namespace {

// Unbiased draw in [0, bound) from raw mt19937_64 output, so the selection is
// identical across standard library implementations.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

bool is_cjk_ideograph(char32_t cp) {
  return (cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3400 && cp <= 0x4DBF);
}

Language effective_language(const Sample& s) { return s.language ? *s.language : detect_language(s.ground_truth); }

ordered_json language_counts(std::span<const Sample> corpus) {
  std::size_t en = 0, zh = 0, other = 0;
  for (const auto& s : corpus) {
    switch (effective_language(s)) {
      case Language::En: ++en; break;
      case Language::Zh: ++zh; break;
      case Language::Other: ++other; break;
    }
  }
  ordered_json j = ordered_json::object();
  j["en"] = en;
  j["zh"] = zh;
  j["other"] = other;
  return j;
}

constexpr double kHistogramBin = 0.05;

}  // namespace

std::string_view to_string(CurationStage stage) noexcept {
  switch (stage) {
    case CurationStage::Type: return "type";
    case CurationStage::Entropy: return "entropy";
    case CurationStage::Balance: return "balance";
  }
  return "";
}

std::optional<CurationStage> parse_curation_stage(std::string_view name) noexcept {
  if (name == "type") return CurationStage::Type;
  if (name == "entropy") return CurationStage::Entropy;
  if (name == "balance") return CurationStage::Balance;
  return std::nullopt;
}

void validate(const FiltrationConfig& cfg) {
  if (cfg.mode == EntropyMode::TopFraction && !(cfg.keep_fraction >= 0.0 && cfg.keep_fraction <= 1.0))
    throw Error(ErrorCode::Config, "top fraction must lie in [0, 1]");
  if (cfg.mode == EntropyMode::Threshold && !std::isfinite(cfg.threshold))
    throw Error(ErrorCode::Config, "entropy threshold must be finite");
}

std::set<std::string> default_plain_doc_types() { return {"slides", "magazines", "books", "newspapers"}; }

EntropyScan compute_entropy_records(std::span<const Sample> corpus) {
  EntropyScan out;
  for (const auto& s : corpus) {
    if (!s.token_logprobs || s.token_logprobs->empty()) {
      out.skipped_ids.push_back(s.id);
      continue;
    }
    out.records.push_back({s.id, s.token_logprobs->size(), mean_entropy(*s.token_logprobs)});
  }
  return out;
}

std::vector<Sample> filter_by_type(std::span<const Sample> corpus, const FiltrationConfig& cfg) {
  std::vector<Sample> out;
  for (const auto& s : corpus) {
    if (s.doc_type && cfg.drop_doc_types.count(*s.doc_type)) continue;
    if (cfg.require_formatted) {
      TypeProfile p = type_profile(s.ground_truth);
      if (!p.has_formula && !p.has_table) continue;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<Sample> filter_by_entropy(std::span<const EntropyRecord> records, std::span<const Sample> corpus,
                                      const FiltrationConfig& cfg) {
  validate(cfg);
  std::unordered_map<std::string, double> entropy;
  for (const auto& r : records) entropy.emplace(r.sample_id, r.mean_entropy);
  bool consistent = entropy.size() == records.size() && records.size() == corpus.size();
  for (const auto& s : corpus) consistent = consistent && entropy.count(s.id);
  if (!consistent) throw Error(ErrorCode::InvalidArgument, "InconsistentRecords: entropy records do not match corpus ids");

  std::vector<bool> keep(corpus.size(), false);
  if (cfg.mode == EntropyMode::Threshold) {
    for (std::size_t i = 0; i < corpus.size(); ++i) keep[i] = entropy.at(corpus[i].id) >= cfg.threshold;
  } else {
    std::vector<std::size_t> order(corpus.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      double ea = entropy.at(corpus[a].id);
      double eb = entropy.at(corpus[b].id);
      if (ea != eb) return ea > eb;
      return corpus[a].id < corpus[b].id;
    });
    // The epsilon absorbs products such as 0.3 * 10 = 3.0000000000000004.
    double target = std::ceil(cfg.keep_fraction * static_cast<double>(corpus.size()) - 1e-9);
    std::size_t k = static_cast<std::size_t>(std::clamp(target, 0.0, static_cast<double>(corpus.size())));
    for (std::size_t i = 0; i < k; ++i) keep[order[i]] = true;
  }
  std::vector<Sample> out;
  for (std::size_t i = 0; i < corpus.size(); ++i)
    if (keep[i]) out.push_back(corpus[i]);
  return out;
}

Language detect_language(std::string_view text) {
  std::size_t non_ascii = 0;
  std::size_t cjk = 0;
  for (char32_t cp : utf8::decode(text)) {
    if (cp < 0x80) continue;
    ++non_ascii;
    if (is_cjk_ideograph(cp)) ++cjk;
  }
  if (non_ascii > 0 && 10 * cjk >= 3 * non_ascii) return Language::Zh;
  return Language::En;
}

BalanceResult balance_languages(std::span<const Sample> corpus, const FiltrationConfig& cfg) {
  BalanceResult out;
  out.samples.assign(corpus.begin(), corpus.end());
  std::vector<std::size_t> en, zh;
  for (std::size_t i = 0; i < out.samples.size(); ++i) {
    Sample& s = out.samples[i];
    if (!s.language) s.language = detect_language(s.ground_truth);
    if (*s.language == Language::En) en.push_back(i);
    else if (*s.language == Language::Zh) zh.push_back(i);
  }
  if (en.empty() || zh.empty()) {
    out.warning = "single-language corpus (en=" + std::to_string(en.size()) + ", zh=" + std::to_string(zh.size()) +
                  "); balancing skipped";
    return out;
  }
  std::vector<std::size_t>& major = en.size() >= zh.size() ? en : zh;
  const std::size_t target = std::min(en.size(), zh.size());
  std::mt19937_64 rng(cfg.seed);
  // Partial Fisher-Yates: the first `target` entries become the survivors.
  for (std::size_t i = 0; i < target; ++i) {
    std::size_t j = i + static_cast<std::size_t>(uniform_below(rng, major.size() - i));
    std::swap(major[i], major[j]);
  }
  std::vector<bool> drop(out.samples.size(), false);
  for (std::size_t i = target; i < major.size(); ++i) drop[major[i]] = true;
  std::vector<Sample> kept;
  kept.reserve(out.samples.size());
  for (std::size_t i = 0; i < out.samples.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(out.samples[i]));
  out.samples = std::move(kept);
  return out;
}

CurationResult run_curation(std::span<const Sample> corpus, const FiltrationConfig& cfg) {
  validate(cfg);
  CurationResult result;
  ordered_json report = ordered_json::object();
  report["build"] = kBuildId;
  report["input"] = corpus.size();
  report["stages"] = ordered_json::array();
  report["warnings"] = ordered_json::array();

  std::vector<Sample> current(corpus.begin(), corpus.end());
  for (CurationStage stage : cfg.stages) {
    ordered_json entry = ordered_json::object();
    entry["stage"] = std::string(to_string(stage));
    entry["in"] = current.size();
    switch (stage) {
      case CurationStage::Type:
        current = filter_by_type(current, cfg);
        break;
      case CurationStage::Entropy: {
        EntropyScan scan = compute_entropy_records(current);
        std::vector<Sample> scorable;
        {
          std::set<std::string> skipped(scan.skipped_ids.begin(), scan.skipped_ids.end());
          for (auto& s : current)
            if (!skipped.count(s.id)) scorable.push_back(std::move(s));
        }
        std::vector<std::size_t> histogram;
        struct Bin {
          std::size_t count = 0;
          double sum = 0.0;
        };
        std::vector<Bin> format_bins(5);
        for (std::size_t i = 0; i < scan.records.size(); ++i) {
          double h = scan.records[i].mean_entropy;
          auto bin = static_cast<std::size_t>(std::floor(h / kHistogramBin + 1e-9));
          if (histogram.size() <= bin) histogram.resize(bin + 1, 0);
          ++histogram[bin];
          double ratio = type_profile(scorable[i].ground_truth).formatted_ratio;
          auto fb = static_cast<std::size_t>(std::clamp(std::ceil(ratio * 5.0 - 1e-9) - 1.0, 0.0, 4.0));
          ++format_bins[fb].count;
          format_bins[fb].sum += h;
        }
        current = filter_by_entropy(scan.records, scorable, cfg);

        entry["mode"] = cfg.mode == EntropyMode::Threshold ? "threshold" : "top_fraction";
        if (cfg.mode == EntropyMode::Threshold) entry["threshold"] = cfg.threshold;
        else entry["keep_fraction"] = cfg.keep_fraction;
        entry["scored"] = scan.records.size();
        entry["skipped_no_logprobs"] = scan.skipped_ids;
        ordered_json hist = ordered_json::object();
        hist["bin_width"] = kHistogramBin;
        hist["counts"] = histogram;
        entry["entropy_histogram"] = hist;
        ordered_json fmt = ordered_json::array();
        for (std::size_t b = 0; b < format_bins.size(); ++b) {
          ordered_json row = ordered_json::object();
          row["formatted_ratio_upper"] = static_cast<double>(b + 1) / 5.0;
          row["count"] = format_bins[b].count;
          if (format_bins[b].count > 0)
            row["mean_entropy"] = format_bins[b].sum / static_cast<double>(format_bins[b].count);
          else
            row["mean_entropy"] = nullptr;
          fmt.push_back(row);
        }
        entry["entropy_by_formatted_ratio"] = fmt;
        break;
      }
      case CurationStage::Balance:
        if (cfg.balance_languages) {
          entry["languages_before"] = language_counts(current);
          BalanceResult b = balance_languages(current, cfg);
          current = std::move(b.samples);
          if (b.warning) report["warnings"].push_back(*b.warning);
        } else {
          entry["skipped"] = true;
        }
        break;
    }
    entry["out"] = current.size();
    report["stages"].push_back(entry);
  }
  report["output"] = current.size();
  report["languages"] = language_counts(current);
  result.kept = std::move(current);
  result.report = std::move(report);
  return result;
}

}  // namespace fdr

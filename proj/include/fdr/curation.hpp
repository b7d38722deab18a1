#pragma once

// RL corpus construction: drop plain-text-only samples, keep the
// highest-entropy samples, and balance Chinese against English.

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/doc_model.hpp"

namespace fdr {

enum class EntropyMode { Threshold, TopFraction };
enum class CurationStage { Type, Entropy, Balance };

std::string_view to_string(CurationStage stage) noexcept;
std::optional<CurationStage> parse_curation_stage(std::string_view name) noexcept;

struct FiltrationConfig {
  EntropyMode mode = EntropyMode::TopFraction;
  double threshold = 0.0;      // keep mean_entropy >= threshold
  double keep_fraction = 0.5;  // keep the top ceil(keep_fraction * n)
  bool require_formatted = true;
  std::set<std::string> drop_doc_types;
  bool balance_languages = false;
  std::uint64_t seed = 0;
  std::vector<CurationStage> stages = {CurationStage::Type, CurationStage::Entropy, CurationStage::Balance};

  // A filtration rate r (share of samples removed) keeps the top 1 - r.
  static double keep_fraction_for_rate(double rate) { return 1.0 - rate; }
};

// Throws Error{Config} on out-of-range values.
void validate(const FiltrationConfig& cfg);

// Document types dropped before RL because they are mostly plain text.
std::set<std::string> default_plain_doc_types();

struct EntropyScan {
  std::vector<EntropyRecord> records;    // input order
  std::vector<std::string> skipped_ids;  // samples without logprobs
};

EntropyScan compute_entropy_records(std::span<const Sample> corpus);

std::vector<Sample> filter_by_type(std::span<const Sample> corpus, const FiltrationConfig& cfg);

// Output keeps corpus order. Throws Error{InvalidArgument} ("InconsistentRecords")
// when the record ids differ from the corpus ids.
std::vector<Sample> filter_by_entropy(std::span<const EntropyRecord> records, std::span<const Sample> corpus,
                                      const FiltrationConfig& cfg);

// zh when at least 30% of the non-ASCII characters are CJK unified ideographs.
Language detect_language(std::string_view text);

struct BalanceResult {
  std::vector<Sample> samples;
  std::optional<std::string> warning;
};

// Untagged samples are tagged first; the majority of {en, zh} is subsampled
// down to the minority count with a PRNG seeded from cfg.seed. Samples tagged
// "other" pass through.
BalanceResult balance_languages(std::span<const Sample> corpus, const FiltrationConfig& cfg);

struct CurationResult {
  std::vector<Sample> kept;
  ordered_json report;
};

// Runs cfg.stages in order. The report holds per-stage counts, language counts,
// an entropy histogram with 0.05-nat bins, and mean entropy per
// formatted-content bin.
CurationResult run_curation(std::span<const Sample> corpus, const FiltrationConfig& cfg);

}  // namespace fdr

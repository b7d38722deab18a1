#pragma once

// GRPO numerics: the per-sample output entropy used for data filtration,
// group-normalized advantages and the clipped surrogate objective.

#include <span>
#include <vector>

namespace fdr {

enum class StdMode { Population };

struct GrpoConfig {
  double epsilon = 0.2;     // clip range, 0 < epsilon < 1
  double std_floor = 1e-8;  // added to the std in the advantage denominator
  StdMode std_mode = StdMode::Population;

  bool operator==(const GrpoConfig&) const = default;
};

// Throws Error{InvalidArgument} unless 0 < epsilon < 1 and std_floor >= 0.
void validate(const GrpoConfig& cfg);

// -(1/N) * sum(logprobs). Logprobs are natural-log token probabilities, so the
// value is a mean negative log-likelihood in nats; it is called entropy here
// because that is what the filtration criterion names it.
// Throws Error{InvalidArgument} on an empty sequence or non-finite / positive values.
double mean_entropy(std::span<const double> logprobs);

// A_i = (R_i - mean) / (population std + std_floor). Requires G >= 1.
std::vector<double> group_advantages(std::span<const double> rewards, const GrpoConfig& cfg = {});

// (1/G) * sum_i min(r_i * A_i, clip(r_i, 1 - eps, 1 + eps) * A_i), with
// sequence-level ratios r_i supplied by the trainer.
double grpo_objective(std::span<const double> ratios, std::span<const double> advantages,
                      const GrpoConfig& cfg = {});

}  // namespace fdr

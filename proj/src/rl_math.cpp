#include "fdr/rl_math.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fdr/error.hpp"

namespace fdr {

void validate(const GrpoConfig& cfg) {
  if (!(cfg.epsilon > 0.0 && cfg.epsilon < 1.0))
    throw Error(ErrorCode::InvalidArgument, "grpo epsilon must lie in (0, 1)");
  if (!(cfg.std_floor >= 0.0) || !std::isfinite(cfg.std_floor))
    throw Error(ErrorCode::InvalidArgument, "grpo std_floor must be finite and >= 0");
}

double mean_entropy(std::span<const double> logprobs) {
  if (logprobs.empty()) throw Error(ErrorCode::InvalidArgument, "EmptySequence: no token logprobs");
  double sum = 0.0;
  for (double lp : logprobs) {
    if (!std::isfinite(lp)) throw Error(ErrorCode::InvalidArgument, "NonFiniteInput: logprob is not finite");
    if (lp > 0.0) throw Error(ErrorCode::InvalidArgument, "logprob > 0");
    sum += lp;
  }
  double h = -sum / static_cast<double>(logprobs.size());
  return h == 0.0 ? 0.0 : h;  // no -0.0
}

std::vector<double> group_advantages(std::span<const double> rewards, const GrpoConfig& cfg) {
  validate(cfg);
  if (rewards.empty()) throw Error(ErrorCode::InvalidArgument, "group_advantages: group is empty");
  for (double r : rewards)
    if (!std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "NonFiniteInput: reward is not finite");

  const double g = static_cast<double>(rewards.size());
  // Accumulate offsets from the first reward so a constant group has an exact
  // mean and a zero numerator.
  const double pivot = rewards.front();
  double offset = 0.0;
  for (double r : rewards) offset += r - pivot;
  const double mean = pivot + offset / g;
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  var /= g;
  const double denom = std::sqrt(var) + cfg.std_floor;

  std::vector<double> out;
  out.reserve(rewards.size());
  for (double r : rewards) {
    double centered = r - mean;
    out.push_back(centered == 0.0 || denom == 0.0 ? 0.0 : centered / denom);
  }
  return out;
}

double grpo_objective(std::span<const double> ratios, std::span<const double> advantages, const GrpoConfig& cfg) {
  validate(cfg);
  if (ratios.size() != advantages.size())
    throw Error(ErrorCode::InvalidArgument, "LengthMismatch: " + std::to_string(ratios.size()) + " ratios vs " +
                                                std::to_string(advantages.size()) + " advantages");
  if (ratios.empty()) throw Error(ErrorCode::InvalidArgument, "grpo_objective: group is empty");
  double sum = 0.0;
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    const double r = ratios[i];
    if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::InvalidArgument, "NonPositiveRatio");
    const double a = advantages[i];
    const double clipped = std::clamp(r, 1.0 - cfg.epsilon, 1.0 + cfg.epsilon);
    sum += std::min(r * a, clipped * a);
  }
  return sum / static_cast<double>(ratios.size());
}

}  // namespace fdr

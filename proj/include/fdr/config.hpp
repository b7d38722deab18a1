#pragma once

// Named reward profiles, loaded from a key-value file:
//
//   # comment
//   [profile default]
//   format_separation = true          # false: whole documents scored as text
//   formula_reward = true             # false: formulas folded into the text stream
//   table_reward = true               # false: tables folded into the text stream
//   text.unicode_nfc = true
//   text.collapse_whitespace = true
//   text.case_fold = false
//   formula.canon_rules = drop_left_right, frac_variants, drop_spacing, array_colspec, unwrap_braces
//   table.node_cap = 5000
//   table.keep_wrappers = true
//   weights.text = 1                  # composite weights, uniform by default
//   weights.formula = 1
//   weights.table = 1
//   grpo.epsilon = 0.2
//   grpo.std_floor = 1e-8
//
// Keys before the first section belong to "default". Every profile starts
// from the built-in defaults. Built-in ablation profiles (overridable):
//   ablation-sm         string match only, no format separation
//   ablation-fp-sm      separation, formulas and tables folded into text
//   ablation-fp-sm-ec   separation, formula reward, tables folded into text

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fdr/reward.hpp"
#include "fdr/rl_math.hpp"

namespace fdr {

struct Profile {
  RewardConfig reward;
  GrpoConfig grpo;

  bool operator==(const Profile&) const = default;
};

// Throws Error{Config} on an unknown key or a bad value.
void apply_setting(Profile& profile, std::string_view key, std::string_view value);

// Round-trips through ConfigRegistry::parse.
std::string serialize(const std::string& name, const Profile& profile);

class ConfigRegistry {
 public:
  static ConfigRegistry builtin();
  static ConfigRegistry parse(std::string_view text);
  static ConfigRegistry load(const std::filesystem::path& path);

  // Throws Error{NotFound}.
  const Profile& get(std::string_view name) const;
  bool contains(std::string_view name) const;
  std::vector<std::string> names() const;
  void set(std::string name, Profile profile);

 private:
  std::map<std::string, Profile, std::less<>> profiles_;
};

}  // namespace fdr

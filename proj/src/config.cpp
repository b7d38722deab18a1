#include "fdr/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "fdr/doc_model.hpp"

namespace fdr {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

Error bad_value(std::string_view key, std::string_view value) {
  return Error(ErrorCode::Config, "invalid value \"" + std::string(value) + "\" for " + std::string(key));
}

bool parse_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw bad_value(key, v);
}

double parse_double(std::string_view key, std::string_view v) {
  double out = 0.0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(out)) throw bad_value(key, v);
  return out;
}

std::size_t parse_size(std::string_view key, std::string_view v) {
  std::size_t out = 0;
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) throw bad_value(key, v);
  return out;
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* fmt_bool(bool b) { return b ? "true" : "false"; }

}  // namespace

void apply_setting(Profile& p, std::string_view key, std::string_view value) {
  value = trim(value);
  RewardConfig& r = p.reward;
  if (key == "format_separation") r.enable_format_separation = parse_bool(key, value);
  else if (key == "formula_reward") r.enable_formula_reward = parse_bool(key, value);
  else if (key == "table_reward") r.enable_table_reward = parse_bool(key, value);
  else if (key == "text.unicode_nfc") r.text_norm.unicode_nfc = parse_bool(key, value);
  else if (key == "text.collapse_whitespace") r.text_norm.collapse_whitespace = parse_bool(key, value);
  else if (key == "text.case_fold") r.text_norm.case_fold = parse_bool(key, value);
  else if (key == "formula.canon_rules") {
    CanonRuleSet rules;
    std::size_t pos = 0;
    while (pos <= value.size()) {
      std::size_t comma = value.find(',', pos);
      std::string_view name = trim(value.substr(pos, comma == std::string_view::npos ? value.npos : comma - pos));
      pos = comma == std::string_view::npos ? value.size() + 1 : comma + 1;
      if (name.empty() || name == "none") continue;
      auto rule = parse_canon_rule(name);
      if (!rule) throw bad_value(key, name);
      rules.rules.push_back(*rule);
    }
    r.canon_rules = rules;
  } else if (key == "table.node_cap") {
    r.table.node_cap = parse_size(key, value);
    if (r.table.node_cap == 0) throw bad_value(key, value);
  } else if (key == "table.keep_wrappers") r.table.keep_wrappers = parse_bool(key, value);
  else if (key == "weights.text" || key == "weights.formula" || key == "weights.table") {
    double w = parse_double(key, value);
    if (!(w > 0.0)) throw bad_value(key, value);
    (key == "weights.text" ? r.weights.text : key == "weights.formula" ? r.weights.formula : r.weights.table) = w;
  } else if (key == "grpo.epsilon") {
    p.grpo.epsilon = parse_double(key, value);
    if (!(p.grpo.epsilon > 0.0 && p.grpo.epsilon < 1.0)) throw bad_value(key, value);
  } else if (key == "grpo.std_floor") {
    p.grpo.std_floor = parse_double(key, value);
    if (!(p.grpo.std_floor >= 0.0)) throw bad_value(key, value);
  } else {
    throw Error(ErrorCode::Config, "unknown config key: " + std::string(key));
  }
}

std::string serialize(const std::string& name, const Profile& p) {
  const RewardConfig& r = p.reward;
  std::string out = "[profile " + name + "]\n";
  auto kv = [&](const char* k, const std::string& v) { out += std::string(k) + " = " + v + "\n"; };
  kv("format_separation", fmt_bool(r.enable_format_separation));
  kv("formula_reward", fmt_bool(r.enable_formula_reward));
  kv("table_reward", fmt_bool(r.enable_table_reward));
  kv("text.unicode_nfc", fmt_bool(r.text_norm.unicode_nfc));
  kv("text.collapse_whitespace", fmt_bool(r.text_norm.collapse_whitespace));
  kv("text.case_fold", fmt_bool(r.text_norm.case_fold));
  std::string rules;
  for (CanonRule rule : r.canon_rules.rules) {
    if (!rules.empty()) rules += ", ";
    rules += to_string(rule);
  }
  kv("formula.canon_rules", rules.empty() ? "none" : rules);
  kv("table.node_cap", std::to_string(r.table.node_cap));
  kv("table.keep_wrappers", fmt_bool(r.table.keep_wrappers));
  kv("weights.text", fmt_double(r.weights.text));
  kv("weights.formula", fmt_double(r.weights.formula));
  kv("weights.table", fmt_double(r.weights.table));
  kv("grpo.epsilon", fmt_double(p.grpo.epsilon));
  kv("grpo.std_floor", fmt_double(p.grpo.std_floor));
  return out;
}

ConfigRegistry ConfigRegistry::builtin() {
  ConfigRegistry reg;
  reg.set("default", Profile{});
  Profile sm;
  sm.reward.enable_format_separation = false;
  reg.set("ablation-sm", sm);
  Profile fp_sm;
  fp_sm.reward.enable_formula_reward = false;
  fp_sm.reward.enable_table_reward = false;
  reg.set("ablation-fp-sm", fp_sm);
  Profile fp_sm_ec;
  fp_sm_ec.reward.enable_table_reward = false;
  reg.set("ablation-fp-sm-ec", fp_sm_ec);
  return reg;
}

ConfigRegistry ConfigRegistry::parse(std::string_view text) {
  ConfigRegistry reg = builtin();
  std::map<std::string, Profile, std::less<>> parsed;
  std::string current = "default";
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return "config line " + std::to_string(line_no) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw Error(ErrorCode::Config, where() + "unterminated section header");
      std::string_view inner = trim(line.substr(1, line.size() - 2));
      if (inner.substr(0, 8) != "profile ") throw Error(ErrorCode::Config, where() + "expected [profile NAME]");
      current = std::string(trim(inner.substr(8)));
      if (current.empty()) throw Error(ErrorCode::Config, where() + "empty profile name");
      parsed.try_emplace(current);
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) throw Error(ErrorCode::Config, where() + "expected key = value");
    try {
      apply_setting(parsed[current], trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::Config, where() + e.what());
    }
  }
  for (auto& [name, profile] : parsed) reg.set(name, profile);
  return reg;
}

ConfigRegistry ConfigRegistry::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error& e) {
    throw Error(ErrorCode::Config, e.what());
  }
  return parse(text);
}

const Profile& ConfigRegistry::get(std::string_view name) const {
  auto it = profiles_.find(name);
  if (it == profiles_.end()) throw Error(ErrorCode::NotFound, "unknown profile: " + std::string(name));
  return it->second;
}

bool ConfigRegistry::contains(std::string_view name) const { return profiles_.find(name) != profiles_.end(); }

std::vector<std::string> ConfigRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, p] : profiles_) out.push_back(name);
  return out;
}

void ConfigRegistry::set(std::string name, Profile profile) { profiles_[std::move(name)] = std::move(profile); }

}  // namespace fdr

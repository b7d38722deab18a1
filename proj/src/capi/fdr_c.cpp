#include "fdr.h"

#include <cstdlib>
#include <cstring>
#include <iostream>
#include <new>
#include <sstream>
#include <string>

#include "fdr/bench.hpp"
#include "fdr/config.hpp"
#include "fdr/pipelines.hpp"
#include "fdr/rl_math.hpp"
#include "fdr/service.hpp"
#include "fdr/text_metrics.hpp"
#include "fdr/version.hpp"

struct fdr_engine {
  fdr::ConfigRegistry registry;
  std::string active = "default";
  fdr::Profile profile;
  unsigned workers = 1;
};

namespace {

thread_local std::string g_last_error;

fdr_status to_status(fdr::ErrorCode code) {
  switch (code) {
    case fdr::ErrorCode::Io: return FDR_E_IO;
    case fdr::ErrorCode::Schema: return FDR_E_SCHEMA;
    case fdr::ErrorCode::Config: return FDR_E_CONFIG;
    case fdr::ErrorCode::InvalidArgument: return FDR_E_INVALID_ARGUMENT;
    case fdr::ErrorCode::EmptyGroundTruth: return FDR_E_EMPTY_GROUND_TRUTH;
    case fdr::ErrorCode::NotFound: return FDR_E_NOT_FOUND;
    case fdr::ErrorCode::MalformedTable: return FDR_E_MALFORMED_TABLE;
  }
  return FDR_E_INTERNAL;
}

template <class Fn>
fdr_status guarded(Fn&& fn) {
  g_last_error.clear();
  try {
    fn();
    return FDR_OK;
  } catch (const fdr::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown exception";
  }
  return FDR_E_INTERNAL;
}

void require(bool ok, const char* what) {
  if (!ok) throw fdr::Error(fdr::ErrorCode::InvalidArgument, what);
}

std::filesystem::path opt_path(const char* p) { return p ? std::filesystem::path(p) : std::filesystem::path(); }

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

fdr_engine* make_engine(fdr::ConfigRegistry registry) {
  auto* e = new fdr_engine{std::move(registry)};
  e->profile = e->registry.get(e->active);
  return e;
}

std::vector<std::string> split_csv(const char* s) {
  std::vector<std::string> out;
  if (!s) return out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    out.push_back(item.substr(b, item.find_last_not_of(" \t") - b + 1));
  }
  return out;
}

}  // namespace

extern "C" {

const char* fdr_version(void) { return fdr::kBuildId; }

const char* fdr_last_error(void) { return g_last_error.c_str(); }

const char* fdr_status_name(fdr_status status) {
  switch (status) {
    case FDR_OK: return "ok";
    case FDR_E_IO: return "IoError";
    case FDR_E_SCHEMA: return "SchemaError";
    case FDR_E_CONFIG: return "ConfigError";
    case FDR_E_INVALID_ARGUMENT: return "InvalidArgument";
    case FDR_E_EMPTY_GROUND_TRUTH: return "EmptyGroundTruth";
    case FDR_E_NOT_FOUND: return "NotFound";
    case FDR_E_MALFORMED_TABLE: return "MalformedTable";
    case FDR_E_INTERNAL: return "InternalError";
  }
  return "unknown";
}

fdr_status fdr_engine_create(const char* config_path, fdr_engine** out) {
  return guarded([&] {
    require(out, "out is NULL");
    *out = nullptr;
    *out = make_engine(config_path ? fdr::ConfigRegistry::load(config_path) : fdr::ConfigRegistry::builtin());
  });
}

fdr_status fdr_engine_create_from_string(const char* config_text, fdr_engine** out) {
  return guarded([&] {
    require(out && config_text, "NULL argument");
    *out = nullptr;
    *out = make_engine(fdr::ConfigRegistry::parse(config_text));
  });
}

void fdr_engine_destroy(fdr_engine* engine) { delete engine; }

fdr_status fdr_engine_use_profile(fdr_engine* engine, const char* name) {
  return guarded([&] {
    require(engine && name, "NULL argument");
    engine->profile = engine->registry.get(name);
    engine->active = name;
  });
}

fdr_status fdr_engine_set(fdr_engine* engine, const char* key, const char* value) {
  return guarded([&] {
    require(engine && key && value, "NULL argument");
    if (std::string_view(key) == "workers") {
      char* end = nullptr;
      const unsigned long w = std::strtoul(value, &end, 10);
      if (!*value || *end || w > 4096) throw fdr::Error(fdr::ErrorCode::Config, std::string("invalid workers: ") + value);
      engine->workers = static_cast<unsigned>(w);
      return;
    }
    fdr::Profile copy = engine->profile;
    fdr::apply_setting(copy, key, value);
    engine->profile = copy;
  });
}

fdr_status fdr_engine_profiles(const fdr_engine* engine, char** out_json) {
  return guarded([&] {
    require(engine && out_json, "NULL argument");
    *out_json = dup_string(fdr::ordered_json(engine->registry.names()).dump());
  });
}

fdr_status fdr_reward(const fdr_engine* engine, const char* prediction, const char* ground_truth,
                      fdr_reward_breakdown* out) {
  return guarded([&] {
    require(engine && prediction && ground_truth && out, "NULL argument");
    const auto b = fdr::format_decoupled_reward(prediction, ground_truth, engine->profile.reward);
    *out = fdr_reward_breakdown{};
    out->has_text = b.text_score.has_value();
    out->has_formula = b.formula_score.has_value();
    out->has_table = b.table_score.has_value();
    out->text = b.text_score.value_or(0.0);
    out->formula = b.formula_score.value_or(0.0);
    out->table = b.table_score.value_or(0.0);
    out->present_types = b.present_types;
    out->composite = b.composite;
  });
}

fdr_status fdr_mean_entropy(const double* logprobs, size_t n, double* out) {
  return guarded([&] {
    require(out && (logprobs || n == 0), "NULL argument");
    *out = fdr::mean_entropy(std::span<const double>(logprobs, n));
  });
}

fdr_status fdr_group_advantages(const fdr_engine* engine, const double* rewards, size_t n, double* out) {
  return guarded([&] {
    require(engine && rewards && out, "NULL argument");
    const auto a = fdr::group_advantages(std::span<const double>(rewards, n), engine->profile.grpo);
    std::copy(a.begin(), a.end(), out);
  });
}

fdr_status fdr_grpo_objective(const fdr_engine* engine, const double* ratios, const double* advantages, size_t n,
                              double* out) {
  return guarded([&] {
    require(engine && ratios && advantages && out, "NULL argument");
    *out = fdr::grpo_objective(std::span<const double>(ratios, n), std::span<const double>(advantages, n),
                               engine->profile.grpo);
  });
}

fdr_status fdr_overall_score(double text_edit, double formula, double table_teds, double* out) {
  return guarded([&] {
    require(out, "NULL argument");
    *out = fdr::overall_score(text_edit, formula, table_teds);
  });
}

fdr_status fdr_levenshtein(const char* a, const char* b, size_t* out) {
  return guarded([&] {
    require(a && b && out, "NULL argument");
    *out = fdr::levenshtein(std::string_view(a), std::string_view(b));
  });
}

fdr_status fdr_teds(const char* pred_markup, const char* gt_markup, int structure_only, double* out) {
  return guarded([&] {
    require(pred_markup && gt_markup && out, "NULL argument");
    *out = fdr::teds(fdr::parse_table(pred_markup), fdr::parse_table(gt_markup), structure_only != 0);
  });
}

void fdr_filter_options_init(fdr_filter_options* opts) {
  if (!opts) return;
  const fdr::FiltrationConfig d;
  opts->mode = FDR_ENTROPY_TOP_FRACTION;
  opts->threshold = d.threshold;
  opts->keep_fraction = d.keep_fraction;
  opts->require_formatted = d.require_formatted;
  opts->balance_languages = d.balance_languages;
  opts->seed = d.seed;
  opts->drop_doc_types = nullptr;
  opts->stages = nullptr;
}

fdr_status fdr_run_segment(const char* input, const char* output) {
  return guarded([&] {
    require(input && output, "NULL argument");
    fdr::run_segment(input, output);
  });
}

fdr_status fdr_run_reward(const fdr_engine* engine, const char* input, const char* output, const char* summary) {
  return guarded([&] {
    require(engine && input && output, "NULL argument");
    fdr::run_reward(input, output, engine->profile.reward, engine->workers, opt_path(summary));
  });
}

fdr_status fdr_run_filter(const fdr_filter_options* opts, const char* input, const char* output, const char* report) {
  return guarded([&] {
    require(opts && input && output, "NULL argument");
    fdr::FiltrationConfig cfg;
    cfg.mode = opts->mode == FDR_ENTROPY_THRESHOLD ? fdr::EntropyMode::Threshold : fdr::EntropyMode::TopFraction;
    cfg.threshold = opts->threshold;
    cfg.keep_fraction = opts->keep_fraction;
    cfg.require_formatted = opts->require_formatted != 0;
    cfg.balance_languages = opts->balance_languages != 0;
    cfg.seed = opts->seed;
    for (auto& t : split_csv(opts->drop_doc_types)) {
      if (t == "plain") {
        for (auto& p : fdr::default_plain_doc_types()) cfg.drop_doc_types.insert(p);
      } else {
        cfg.drop_doc_types.insert(t);
      }
    }
    if (opts->stages) {
      cfg.stages.clear();
      for (auto& name : split_csv(opts->stages)) {
        auto stage = fdr::parse_curation_stage(name);
        if (!stage) throw fdr::Error(fdr::ErrorCode::Config, "unknown curation stage: " + name);
        cfg.stages.push_back(*stage);
      }
    }
    fdr::run_filter(input, output, cfg, opt_path(report));
  });
}

fdr_status fdr_run_bench(const fdr_engine* engine, const char* input, const char* output, const char* formula_scores,
                         const char* table, const char* per_sample) {
  return guarded([&] {
    require(engine && input && output, "NULL argument");
    fdr::BenchPaths paths{opt_path(formula_scores), opt_path(table), opt_path(per_sample)};
    fdr::run_bench(input, output, engine->profile.reward, paths, engine->workers);
  });
}

fdr_status fdr_run_bench_rows(const char* input, const char* output, const char* table) {
  return guarded([&] {
    require(input && output, "NULL argument");
    fdr::run_bench_rows(input, output, opt_path(table));
  });
}

fdr_status fdr_run_advantages(const fdr_engine* engine, const char* input, const char* output) {
  return guarded([&] {
    require(engine && input && output, "NULL argument");
    fdr::run_advantages(input, output, engine->profile.grpo);
  });
}

fdr_status fdr_handle_request(const fdr_engine* engine, const char* request_json, char** out_json) {
  return guarded([&] {
    require(engine && request_json && out_json, "NULL argument");
    *out_json = nullptr;
    *out_json = dup_string(fdr::handle_line(engine->registry, request_json, engine->workers));
  });
}

void fdr_string_free(char* s) { std::free(s); }

fdr_status fdr_serve_pipe(const fdr_engine* engine) {
  return guarded([&] {
    require(engine, "NULL argument");
    std::ios::sync_with_stdio(false);
    fdr::serve_pipe(std::cin, std::cout, engine->registry, engine->workers);
  });
}

fdr_status fdr_serve_http(const fdr_engine* engine, const char* bind) {
  return guarded([&] {
    require(engine, "NULL argument");
    fdr::serve_http(bind ? bind : "127.0.0.1:8080", engine->registry, engine->workers);
  });
}

}  // extern "C"

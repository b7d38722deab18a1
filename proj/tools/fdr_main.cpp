// fdr: batch front end over the C API.
//
// Exit codes: 0 ok, 1 I/O, 2 schema or bad input data, 3 config or unknown
// profile, 4 internal error, 64 usage.

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "fdr.h"

namespace {

int exit_code(fdr_status s) {
  switch (s) {
    case FDR_OK: return 0;
    case FDR_E_IO: return 1;
    case FDR_E_SCHEMA:
    case FDR_E_INVALID_ARGUMENT:
    case FDR_E_EMPTY_GROUND_TRUTH:
    case FDR_E_MALFORMED_TABLE: return 2;
    case FDR_E_CONFIG:
    case FDR_E_NOT_FOUND: return 3;
    case FDR_E_INTERNAL: return 4;
  }
  return 4;
}

int report(fdr_status s) {
  if (s != FDR_OK) std::fprintf(stderr, "fdr: %s: %s\n", fdr_status_name(s), fdr_last_error());
  return exit_code(s);
}

const char* opt(const std::string& s) { return s.empty() ? nullptr : s.c_str(); }

struct EngineFlags {
  std::string config;
  std::string profile = "default";
  bool no_separation = false;
  bool no_formula = false;
  bool no_table = false;
  unsigned workers = 1;
};

struct EngineGuard {
  fdr_engine* e = nullptr;
  ~EngineGuard() { fdr_engine_destroy(e); }
};

fdr_status open_engine(const EngineFlags& f, EngineGuard& g) {
  fdr_status s = fdr_engine_create(opt(f.config), &g.e);
  if (s != FDR_OK) return s;
  if ((s = fdr_engine_use_profile(g.e, f.profile.c_str())) != FDR_OK) return s;
  if (f.no_separation && (s = fdr_engine_set(g.e, "format_separation", "false")) != FDR_OK) return s;
  if (f.no_formula && (s = fdr_engine_set(g.e, "formula_reward", "false")) != FDR_OK) return s;
  if (f.no_table && (s = fdr_engine_set(g.e, "table_reward", "false")) != FDR_OK) return s;
  return fdr_engine_set(g.e, "workers", std::to_string(f.workers).c_str());
}

void add_engine_flags(CLI::App* cmd, EngineFlags& f) {
  cmd->add_option("--config", f.config, "Profile config file");
  cmd->add_option("--profile", f.profile, "Active profile")->capture_default_str();
  cmd->add_flag("--no-format-separation", f.no_separation, "Score whole documents as text");
  cmd->add_flag("--no-formula-reward", f.no_formula, "Fold formulas into the text stream");
  cmd->add_flag("--no-table-reward", f.no_table, "Fold tables into the text stream");
  cmd->add_option("--workers", f.workers, "Worker threads, 0 = all cores")->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Format-decoupled reward and evaluation engine"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(fdr_version()));

  std::string input, output;
  EngineFlags eng;

  auto* seg = app.add_subcommand("segment", "Split ground truths into text, formula and table segments");
  seg->add_option("input", input, "Corpus JSONL")->required();
  seg->add_option("-o,--output", output, "Segments JSONL")->required();

  std::string summary;
  auto* rew = app.add_subcommand("reward", "Score predictions against ground truths");
  rew->add_option("input", input, "Corpus JSONL with predictions")->required();
  rew->add_option("-o,--output", output, "Reward JSONL")->required();
  rew->add_option("--summary", summary, "Summary sidecar (default <output>.summary.json)");
  add_engine_flags(rew, eng);

  fdr_filter_options fo;
  fdr_filter_options_init(&fo);
  std::string report_path, drop_types, order;
  double top_fraction = -1, threshold = 0, rate = -1;
  bool require_formatted = true, no_require_formatted = false, balance = false;
  std::uint64_t seed = 0;
  auto* fil = app.add_subcommand("filter", "Curate an RL corpus by type, entropy and language");
  fil->add_option("input", input, "Corpus JSONL with token_logprobs")->required();
  fil->add_option("-o,--output", output, "Curated corpus JSONL")->required();
  fil->add_option("--report", report_path, "Report sidecar (default <output>.report.json)");
  auto* o_top = fil->add_option("--top-fraction", top_fraction, "Keep the top fraction by entropy");
  auto* o_thr = fil->add_option("--threshold", threshold, "Keep samples with entropy >= threshold");
  auto* o_rate = fil->add_option("--filtration-rate", rate, "Share of samples removed by entropy");
  o_top->excludes(o_thr)->excludes(o_rate);
  o_thr->excludes(o_rate);
  fil->add_flag("--require-formatted", require_formatted, "Drop samples without formulas or tables (default)");
  fil->add_flag("--no-require-formatted", no_require_formatted, "Keep plain-text-only samples");
  fil->add_flag("--balance-languages", balance, "Subsample the majority of en/zh");
  fil->add_option("--seed", seed, "PRNG seed for language balancing")->capture_default_str();
  fil->add_option("--order", order, "Stage order, e.g. type,balance,entropy");
  fil->add_option("--drop-doc-types", drop_types, "Comma separated doc types; 'plain' expands to the defaults");

  std::string formula_scores, table_path, per_sample;
  bool rows = false;
  auto* ben = app.add_subcommand("bench", "Evaluate a corpus or recheck printed result rows");
  ben->add_option("input", input, "Corpus JSONL, or result rows with --rows")->required();
  ben->add_option("-o,--output", output, "Report JSONL")->required();
  ben->add_option("--formula-scores", formula_scores, "External formula scores JSONL {id, formula}");
  ben->add_option("--table", table_path, "Text table sidecar (default <output>.txt)");
  ben->add_option("--per-sample", per_sample, "Per-sample metrics JSONL");
  ben->add_flag("--rows", rows, "Input holds {name, text_edit, formula, table_teds, overall_printed} rows");
  add_engine_flags(ben, eng);

  auto* adv = app.add_subcommand("advantages", "Group-normalized advantages per reward group");
  adv->add_option("input", input, "Groups JSONL")->required();
  adv->add_option("-o,--output", output, "Rollouts JSONL")->required();
  add_engine_flags(adv, eng);

  std::string bind = "127.0.0.1:8080", profiles;
  bool stdio = false;
  auto* srv = app.add_subcommand("serve", "Reward service over HTTP or stdio");
  srv->add_option("--bind", bind, "host:port (FDR_BIND overrides)")->capture_default_str();
  srv->add_option("--profiles", profiles, "Profile config file");
  srv->add_option("--workers", eng.workers, "Worker threads, 0 = all cores")->capture_default_str();
  srv->add_flag("--stdio", stdio, "Newline-delimited JSON on stdin/stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 64;
  }

  if (seg->parsed()) return report(fdr_run_segment(input.c_str(), output.c_str()));

  if (fil->parsed()) {
    if (*o_thr) {
      fo.mode = FDR_ENTROPY_THRESHOLD;
      fo.threshold = threshold;
    } else if (*o_rate) {
      fo.keep_fraction = 1.0 - rate;
    } else if (*o_top) {
      fo.keep_fraction = top_fraction;
    }
    fo.require_formatted = require_formatted && !no_require_formatted;
    fo.balance_languages = balance;
    fo.seed = seed;
    fo.drop_doc_types = opt(drop_types);
    fo.stages = opt(order);
    return report(fdr_run_filter(&fo, input.c_str(), output.c_str(), opt(report_path)));
  }

  if (ben->parsed() && rows) return report(fdr_run_bench_rows(input.c_str(), output.c_str(), opt(table_path)));

  if (srv->parsed()) eng.config = profiles;
  EngineGuard g;
  if (fdr_status s = open_engine(eng, g); s != FDR_OK) return report(s);

  if (rew->parsed()) return report(fdr_run_reward(g.e, input.c_str(), output.c_str(), opt(summary)));
  if (ben->parsed())
    return report(fdr_run_bench(g.e, input.c_str(), output.c_str(), opt(formula_scores), opt(table_path),
                                opt(per_sample)));
  if (adv->parsed()) return report(fdr_run_advantages(g.e, input.c_str(), output.c_str()));
  if (stdio) return report(fdr_serve_pipe(g.e));
  return report(fdr_serve_http(g.e, bind.c_str()));
}

// privflow: run, report and inspect multi-agent privacy evaluations.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "privflow/datasets.hpp"
#include "privflow/errors.hpp"
#include "privflow/runner.hpp"

#ifndef PRIVFLOW_TEMPLATE_DIR
#define PRIVFLOW_TEMPLATE_DIR "templates"
#endif
#ifndef PRIVFLOW_DATA_DIR
#define PRIVFLOW_DATA_DIR "data"
#endif

namespace {

void add_run_options(CLI::App* cmd, privflow::RunConfig& config, std::string& config_file,
                     std::string& kind, std::string& mode, std::string& nt_scope) {
  cmd->add_option("--config", config_file, "JSON config file (flags override its values)");
  cmd->add_option("--corpus", config.corpus, "corpus manifest (.json) or instance file (.jsonl)");
  cmd->add_option("--kind", kind, "benchmark kind for bare .jsonl corpora")
      ->check(CLI::IsMember({"confaide", "privacylens", "synthetic"}));
  cmd->add_option("--variants", config.variants, "flow variants (canonical names)");
  cmd->add_option("--mode", mode, "backend mode")->check(CLI::IsMember({"scripted", "replay", "live"}));
  cmd->add_option("--cassette", config.cassette, "cassette path (replay source / record target)");
  cmd->add_option("--model", config.models.default_model, "default model id");
  cmd->add_option("--out", config.output_dir, "output directory");
  cmd->add_option("--samples", config.sampling.num_samples, "samples per prompt");
  cmd->add_option("--seed", config.sampling.seed, "sampling seed");
  cmd->add_option("--budget", config.call_budget, "global call budget (0 = unlimited)");
  cmd->add_option("--jobs", config.concurrency, "concurrent pipeline workers");
  cmd->add_option("--templates", config.templates_dir, "prompt template directory");
  cmd->add_option("--nt-scope", nt_scope,
                  "who loses transcript access in -nt variants: both | executor-only")
      ->check(CLI::IsMember({"both", "executor-only"}));
}

privflow::RunConfig finalize_config(const privflow::RunConfig& flags, const std::string& config_file,
                                    const std::string& kind, const std::string& mode,
                                    const std::string& nt_scope) {
  privflow::RunConfig config =
      config_file.empty() ? privflow::RunConfig{} : privflow::config_from_json_file(config_file);
  if (!flags.corpus.empty()) config.corpus = flags.corpus;
  if (!flags.variants.empty()) config.variants = flags.variants;
  if (!flags.cassette.empty()) config.cassette = flags.cassette;
  if (flags.models.default_model != "scripted-model")
    config.models.default_model = flags.models.default_model;
  if (!flags.output_dir.empty()) config.output_dir = flags.output_dir;
  if (flags.sampling.num_samples != 10) config.sampling.num_samples = flags.sampling.num_samples;
  if (flags.sampling.seed != 99) config.sampling.seed = flags.sampling.seed;
  if (flags.call_budget != 0) config.call_budget = flags.call_budget;
  if (flags.concurrency != 4) config.concurrency = flags.concurrency;
  if (!flags.templates_dir.empty()) config.templates_dir = flags.templates_dir;
  if (!kind.empty()) config.kind = privflow::benchmark_kind_from_string(kind);
  if (!mode.empty()) config.mode = privflow::backend_mode_from_string(mode);
  if (!nt_scope.empty())
    config.nt_scope =
        nt_scope == "executor-only" ? privflow::NtScope::ExecutorOnly : privflow::NtScope::Both;
  if (config.templates_dir.empty()) config.templates_dir = PRIVFLOW_TEMPLATE_DIR;
  if (config.variants.empty()) config.variants = privflow::all_variant_names();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multi-agent contextual-privacy evaluation"};
  app.require_subcommand(1);

  privflow::RunConfig flags;
  std::string config_file, kind, mode, nt_scope;

  auto* run_cmd = app.add_subcommand("run", "execute a full evaluation run");
  add_run_options(run_cmd, flags, config_file, kind, mode, nt_scope);

  auto* record_cmd = app.add_subcommand("record", "run live while recording a cassette");
  add_run_options(record_cmd, flags, config_file, kind, mode, nt_scope);

  std::string report_dir;
  auto* report_cmd = app.add_subcommand("report", "re-render tables from a run directory");
  report_cmd->add_option("run_dir", report_dir, "run directory")->required();

  std::string gen_out = "synthetic.jsonl";
  int gen_count = 24;
  std::uint64_t gen_seed = 99;
  bool gen_no_nonce = false;
  auto* gen_cmd = app.add_subcommand("gen-corpus", "generate a synthetic scenario corpus");
  gen_cmd->add_option("--out", gen_out, "output jsonl path");
  gen_cmd->add_option("--count", gen_count, "number of instances");
  gen_cmd->add_option("--seed", gen_seed, "generator seed");
  gen_cmd->add_flag("--no-nonce", gen_no_nonce, "omit the per-instance transcript nonce");

  std::string validate_path, validate_kind = "confaide";
  auto* validate_cmd = app.add_subcommand("validate", "validate a corpus file");
  validate_cmd->add_option("corpus", validate_path, "jsonl corpus or manifest")->required();
  validate_cmd->add_option("--kind", validate_kind, "benchmark kind for bare .jsonl files")
      ->check(CLI::IsMember({"confaide", "privacylens", "synthetic"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed() || record_cmd->parsed()) {
      const privflow::RunConfig config =
          finalize_config(flags, config_file, kind, mode, nt_scope);
      privflow::run(config, record_cmd->parsed());
      std::cout << "run complete: " << config.output_dir << "\n";
    } else if (report_cmd->parsed()) {
      privflow::report(report_dir);
      std::cout << "report written: " << report_dir << "/report.md\n";
    } else if (gen_cmd->parsed()) {
      privflow::SyntheticSpec spec;
      spec.count = gen_count;
      spec.seed = gen_seed;
      spec.plant_nonce = !gen_no_nonce;
      const auto corpus = privflow::generate_synthetic(spec);
      privflow::save_corpus(gen_out, corpus);
      std::cout << "wrote " << corpus.size() << " instances to " << gen_out << "\n";
    } else if (validate_cmd->parsed()) {
      privflow::RunConfig config;
      config.corpus = validate_path;
      config.kind = privflow::benchmark_kind_from_string(validate_kind);
      privflow::BenchmarkKind loaded = config.kind;
      const auto corpus = privflow::load_config_corpus(config, loaded);
      std::cout << corpus.size() << " instances valid (" << privflow::to_string(loaded) << ")\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

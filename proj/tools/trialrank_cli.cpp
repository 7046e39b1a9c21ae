// Batch front end for the ranking pipeline:
//   ingest -> featurize -> reduce -> split -> rank -> evaluate
// Every stage is driven by one declarative JSON config and emits a
// deterministic manifest chaining its inputs' hashes.

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "trialrank/pipeline.hpp"

using namespace trialrank;

int main(int argc, char** argv) {
  CLI::App app{"trialrank - rank candidate trial registrations for systematic review updates"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_override;
  std::string status_override;
  long long seed_override = -1;

  app.fallthrough();  // accept global options after the subcommand too
  app.add_option("--config", config_path, "path to the run config (JSON)")->required();
  app.add_option("--out", out_override, "override the config's output directory");
  app.add_option("--seed", seed_override, "override the config's global seed");
  app.add_option("--status", status_override,
                 "keep only records with this status (e.g. completed)");

  auto* cmd_ingest = app.add_subcommand("ingest", "parse records into a corpus snapshot");
  auto* cmd_featurize = app.add_subcommand("featurize", "build vocabulary and feature matrix");
  auto* cmd_reduce = app.add_subcommand("reduce", "fit PCA/LDA and emit reduced features");
  auto* cmd_split = app.add_subcommand("split", "date-ordered train/test link split");
  auto* cmd_rank = app.add_subcommand("rank", "rank candidates per review");
  auto* cmd_evaluate = app.add_subcommand("evaluate", "median rank, recall@N, WSS@95%");
  auto* cmd_sweep = app.add_subcommand("sweep", "grid of rank+evaluate runs");
  auto* cmd_pipeline = app.add_subcommand("pipeline", "run every stage in order");

  CLI11_PARSE(app, argc, argv);

  try {
    RunConfig cfg = load_config(config_path);
    if (!out_override.empty()) cfg.out = out_override;
    if (seed_override >= 0) {
      cfg.seed = static_cast<std::uint64_t>(seed_override);
      cfg.matfac_hp.seed = cfg.seed;
    }
    if (!status_override.empty()) cfg.status_filter = status_override;

    if (cmd_ingest->parsed()) pipeline::run_ingest(cfg);
    if (cmd_featurize->parsed()) pipeline::run_featurize(cfg);
    if (cmd_reduce->parsed()) pipeline::run_reduce(cfg);
    if (cmd_split->parsed()) pipeline::run_split(cfg);
    if (cmd_rank->parsed()) pipeline::run_rank(cfg);
    if (cmd_evaluate->parsed()) {
      EvalReport report = pipeline::run_evaluate(cfg);
      std::printf("%s: median_rank=%g recall@100=%g wss95=%g (n_candidates=%zu)\n",
                  report.method_label.c_str(), report.median_rank,
                  report.recall_at.count(100) ? report.recall_at.at(100) : 1.0,
                  report.wss95, report.n_candidates);
    }
    if (cmd_sweep->parsed()) pipeline::run_sweep(cfg);
    if (cmd_pipeline->parsed()) pipeline::run_all(cfg);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}

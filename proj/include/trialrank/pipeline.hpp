#pragma once

#include "trialrank/config.hpp"
#include "trialrank/metrics.hpp"

namespace trialrank::pipeline {

// Each stage reads the previous stage's artifacts from cfg.out, validates
// their hashes, and writes its own outputs plus a deterministic manifest
// chaining the upstream manifest hashes.
void run_ingest(const RunConfig& cfg);
void run_featurize(const RunConfig& cfg);
void run_reduce(const RunConfig& cfg);
void run_split(const RunConfig& cfg);
void run_rank(const RunConfig& cfg);
EvalReport run_evaluate(const RunConfig& cfg);

// Shared ingest/featurize/reduce/split, then one rank+evaluate run per
// grid point; a combined summary lands in cfg.out/summary.csv.
void run_sweep(const RunConfig& cfg);

// ingest -> featurize -> reduce -> split -> rank -> evaluate
void run_all(const RunConfig& cfg);

}  // namespace trialrank::pipeline

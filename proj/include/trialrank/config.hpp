#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "trialrank/matfac.hpp"
#include "trialrank/metrics.hpp"
#include "trialrank/simrank.hpp"
#include "trialrank/vectorize.hpp"

namespace trialrank {

// Bad input or mismatched artifacts; the CLI exits 1 for these and 2 for
// runtime/numerical failures.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ReduceMethod { none, pca, lda };
ReduceMethod reduce_method_from_string(const std::string& s);
const char* to_string(ReduceMethod m);

enum class MethodName { simrank, matfac };

struct RunConfig {
  std::filesystem::path corpus;  // record directory or snapshot file
  std::filesystem::path links;
  std::filesystem::path out;
  std::uint64_t seed = 42;
  std::string status_filter;
  bool strip_markup = true;

  // featurize
  Weighting weighting = Weighting::tfidf;
  std::uint64_t min_df = 5;
  TfidfOptions tfidf;

  // reduce
  ReduceMethod reduce_method = ReduceMethod::none;
  std::size_t reduce_k = 20;
  double lda_alpha = 0;  // <= 0 selects 50/k
  double lda_beta = 0.01;
  std::uint64_t lda_sweeps = 1000;

  // split
  std::size_t min_train = 3;

  // method
  MethodName method = MethodName::simrank;
  SimilarityMetric metric = SimilarityMetric::cosine;
  Aggregation aggregation = Aggregation::mean;
  Hyperparams matfac_hp;

  WssVariant wss_variant = WssVariant::global_depth;

  // sweep grids
  std::vector<std::size_t> sweep_matfac_k;
  std::vector<std::string> sweep_simrank_metrics;

  // Serialized form of the settings that must match across stages.
  std::string settings_fingerprint() const;
};

RunConfig load_config(const std::filesystem::path& path);

}  // namespace trialrank

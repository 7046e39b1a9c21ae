#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

#include "trialrank/feature_matrix.hpp"

namespace trialrank {

struct LdaModel {
  Eigen::MatrixXd topic_term;  // k x J, rows sum to 1
  double alpha = 0;            // document-topic prior
  double beta = 0.01;          // topic-term prior
  std::uint64_t sweeps = 1000;
  std::uint64_t seed = 0;
  std::uint64_t input_axis_hash = 0;

  std::size_t k() const { return static_cast<std::size_t>(topic_term.rows()); }
  std::size_t vocab_size() const { return static_cast<std::size_t>(topic_term.cols()); }
  std::uint64_t content_hash() const;
};

struct LdaInference {
  Eigen::VectorXd distribution;  // k-simplex point
  bool empty_document = false;   // uniform fallback was used
};

// Collapsed Gibbs sampler over word-count input. alpha <= 0 selects the
// 50/k default. Reproducible for a fixed seed.
LdaModel fit_lda(const FeatureMatrix& features, std::size_t k, double alpha = 0,
                 double beta = 0.01, std::uint64_t sweeps = 1000,
                 std::uint64_t seed = 0);

// Fold-in Gibbs with fixed topic_term. doc_counts indexes the model's
// vocabulary. Empty documents yield the uniform distribution, flagged.
LdaInference infer_lda(const LdaModel& model,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& doc_counts,
                       std::uint64_t seed = 0, std::uint64_t sweeps = 200);

// Fold-in every row of a frequency matrix; per-document generators are
// seeded deterministically so the result is thread-count independent.
FeatureMatrix lda_transform(const LdaModel& model, const FeatureMatrix& features,
                            std::uint64_t seed = 0, Exec exec = Exec::parallel);

void save_lda(const LdaModel& m, const std::filesystem::path& path);
LdaModel load_lda(const std::filesystem::path& path);

}  // namespace trialrank

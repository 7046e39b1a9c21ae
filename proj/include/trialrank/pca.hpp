#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>

#include "trialrank/feature_matrix.hpp"

namespace trialrank {

struct PcaModel {
  Eigen::MatrixXd components;          // k x J, orthonormal rows
  Eigen::VectorXd mean;                // J
  Eigen::VectorXd explained_variance;  // k, non-increasing
  std::uint64_t seed = 0;
  std::uint64_t input_axis_hash = 0;

  std::size_t k() const { return static_cast<std::size_t>(components.rows()); }
  std::uint64_t content_hash() const;
};

// Truncated SVD of the mean-centered matrix via a randomized range finder.
// Centering is implicit, sparse input is never densified. Deterministic
// for a fixed seed.
PcaModel fit_pca(const FeatureMatrix& features, std::size_t k,
                 std::uint64_t seed = 0, std::size_t oversample = 10,
                 std::size_t power_iterations = 7);

// (X - mean) * components^T
FeatureMatrix transform_pca(const PcaModel& model, const FeatureMatrix& features);

// Z * components + mean, for reconstruction checks.
Eigen::MatrixXd inverse_transform_pca(const PcaModel& model,
                                      const Eigen::MatrixXd& reduced);

void save_pca(const PcaModel& m, const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace trialrank

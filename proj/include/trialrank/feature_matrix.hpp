#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace trialrank {

// Execution mode for the data-parallel kernels. Every parallel kernel has
// a serial reference path producing bit-identical output; tests compare
// the two.
enum class Exec { serial, parallel };

enum class Axis { vocabulary_term, pca_component, lda_topic };
enum class Weighting { binary, frequency, tfidf, none };

const char* to_string(Axis a);
const char* to_string(Weighting w);
Axis axis_from_string(const std::string& s);
Weighting weighting_from_string(const std::string& s);

// Documents x features. Sparse CSR for full-dimension vocabulary spaces,
// dense row-major for reduced spaces. Immutable once built.
struct FeatureMatrix {
  std::vector<std::string> row_ids;
  Axis axis = Axis::vocabulary_term;
  Weighting weighting = Weighting::none;
  std::size_t cols = 0;
  bool sparse = true;

  // CSR (valid when sparse)
  std::vector<std::uint64_t> indptr;
  std::vector<std::uint32_t> indices;
  std::vector<double> values;

  // row-major (valid when !sparse)
  std::vector<double> dense;

  // Fingerprint of the vocabulary / model that defines the feature axis.
  std::uint64_t axis_hash = 0;

  std::size_t rows() const { return row_ids.size(); }
  double at(std::size_t r, std::size_t c) const;
  Eigen::MatrixXd to_dense() const;
  // Dense copy of one row.
  Eigen::VectorXd row(std::size_t r) const;

  std::uint64_t content_hash() const;

  static FeatureMatrix from_dense(const Eigen::MatrixXd& m,
                                  std::vector<std::string> row_ids, Axis axis,
                                  std::uint64_t axis_hash);
};

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path);
FeatureMatrix load_feature_matrix(const std::filesystem::path& path);

}  // namespace trialrank

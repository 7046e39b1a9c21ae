#include "trialrank/feature_matrix.hpp"

#include <fstream>
#include <stdexcept>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"

namespace trialrank {

const char* to_string(Axis a) {
  switch (a) {
    case Axis::vocabulary_term: return "vocabulary-term";
    case Axis::pca_component: return "pca-component";
    case Axis::lda_topic: return "lda-topic";
  }
  return "?";
}

const char* to_string(Weighting w) {
  switch (w) {
    case Weighting::binary: return "binary";
    case Weighting::frequency: return "frequency";
    case Weighting::tfidf: return "tfidf";
    case Weighting::none: return "none";
  }
  return "?";
}

Axis axis_from_string(const std::string& s) {
  if (s == "vocabulary-term") return Axis::vocabulary_term;
  if (s == "pca-component") return Axis::pca_component;
  if (s == "lda-topic") return Axis::lda_topic;
  throw std::runtime_error("unknown feature axis: " + s);
}

Weighting weighting_from_string(const std::string& s) {
  if (s == "binary") return Weighting::binary;
  if (s == "frequency") return Weighting::frequency;
  if (s == "tfidf") return Weighting::tfidf;
  if (s == "none") return Weighting::none;
  throw std::runtime_error("unknown weighting: " + s);
}

double FeatureMatrix::at(std::size_t r, std::size_t c) const {
  if (r >= rows() || c >= cols) throw std::out_of_range("FeatureMatrix::at");
  if (!sparse) return dense[r * cols + c];
  for (std::uint64_t k = indptr[r]; k < indptr[r + 1]; k++)
    if (indices[k] == c) return values[k];
  return 0.0;
}

Eigen::MatrixXd FeatureMatrix::to_dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows()),
                                            static_cast<Eigen::Index>(cols));
  if (sparse) {
    for (std::size_t r = 0; r < rows(); r++)
      for (std::uint64_t k = indptr[r]; k < indptr[r + 1]; k++)
        m(static_cast<Eigen::Index>(r), indices[k]) = values[k];
  } else {
    for (std::size_t r = 0; r < rows(); r++)
      for (std::size_t c = 0; c < cols; c++)
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = dense[r * cols + c];
  }
  return m;
}

Eigen::VectorXd FeatureMatrix::row(std::size_t r) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(cols));
  if (sparse) {
    for (std::uint64_t k = indptr[r]; k < indptr[r + 1]; k++)
      v(indices[k]) = values[k];
  } else {
    for (std::size_t c = 0; c < cols; c++) v(static_cast<Eigen::Index>(c)) = dense[r * cols + c];
  }
  return v;
}

std::uint64_t FeatureMatrix::content_hash() const {
  Fnv1a h;
  for (const auto& id : row_ids) h.update(id);
  h.update_pod(axis);
  h.update_pod(weighting);
  h.update_pod(cols);
  h.update_pod(axis_hash);
  if (sparse) {
    h.update(indptr.data(), indptr.size() * sizeof(indptr[0]));
    h.update(indices.data(), indices.size() * sizeof(indices[0]));
    h.update(values.data(), values.size() * sizeof(values[0]));
  } else {
    h.update(dense.data(), dense.size() * sizeof(dense[0]));
  }
  return h.digest();
}

FeatureMatrix FeatureMatrix::from_dense(const Eigen::MatrixXd& m,
                                        std::vector<std::string> ids, Axis axis,
                                        std::uint64_t axis_hash) {
  if (static_cast<std::size_t>(m.rows()) != ids.size())
    throw std::runtime_error("row id count does not match matrix rows");
  FeatureMatrix fm;
  fm.row_ids = std::move(ids);
  fm.axis = axis;
  fm.weighting = Weighting::none;
  fm.cols = static_cast<std::size_t>(m.cols());
  fm.sparse = false;
  fm.axis_hash = axis_hash;
  fm.dense.resize(fm.rows() * fm.cols);
  for (std::size_t r = 0; r < fm.rows(); r++)
    for (std::size_t c = 0; c < fm.cols; c++)
      fm.dense[r * fm.cols + c] =
          m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
  return fm;
}

void save_feature_matrix(const FeatureMatrix& m, const std::filesystem::path& path) {
  atomic_write(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.header("feature_matrix");
    w.str(to_string(m.axis));
    w.str(to_string(m.weighting));
    w.u64(m.rows());
    w.u64(m.cols);
    w.u64(m.axis_hash);
    for (const auto& id : m.row_ids) w.str(id);
    w.u32(m.sparse ? 1 : 0);
    if (m.sparse) {
      w.u64(m.indptr.size());
      for (auto v : m.indptr) w.u64(v);
      w.u32_array(m.indices.data(), m.indices.size());
      w.f64_array(m.values.data(), m.values.size());
    } else {
      w.f64_array(m.dense.data(), m.dense.size());
    }
  });
}

FeatureMatrix load_feature_matrix(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open feature matrix: " + path.string());
  BinaryReader r(is, path.string());
  r.header("feature_matrix");
  FeatureMatrix m;
  m.axis = axis_from_string(r.str());
  m.weighting = weighting_from_string(r.str());
  std::uint64_t nrows = r.u64();
  m.cols = r.u64();
  m.axis_hash = r.u64();
  m.row_ids.reserve(nrows);
  for (std::uint64_t i = 0; i < nrows; i++) m.row_ids.push_back(r.str());
  m.sparse = r.u32() != 0;
  if (m.sparse) {
    std::uint64_t n = r.u64();
    m.indptr.reserve(n);
    for (std::uint64_t i = 0; i < n; i++) m.indptr.push_back(r.u64());
    m.indices = r.u32_array();
    m.values = r.f64_array();
    if (m.indptr.size() != nrows + 1 || m.indices.size() != m.values.size())
      throw std::runtime_error("inconsistent sparse sections in " + path.string());
  } else {
    m.dense = r.f64_array();
    if (m.dense.size() != nrows * m.cols)
      throw std::runtime_error("inconsistent dense section in " + path.string());
  }
  return m;
}

}  // namespace trialrank

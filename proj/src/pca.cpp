#include "trialrank/pca.hpp"

#include <fstream>
#include <random>
#include <stdexcept>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"

namespace trialrank {

namespace {

// X * M for CSR or dense FeatureMatrix, without densifying X.
Eigen::MatrixXd right_multiply(const FeatureMatrix& x, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.rows()), m.cols());
  if (x.sparse) {
    for (std::size_t r = 0; r < x.rows(); r++)
      for (std::uint64_t idx = x.indptr[r]; idx < x.indptr[r + 1]; idx++)
        out.row(static_cast<Eigen::Index>(r)) += x.values[idx] * m.row(x.indices[idx]);
  } else {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        xd(x.dense.data(), static_cast<Eigen::Index>(x.rows()),
           static_cast<Eigen::Index>(x.cols));
    out = xd * m;
  }
  return out;
}

// X^T * M
Eigen::MatrixXd left_multiply_transposed(const FeatureMatrix& x, const Eigen::MatrixXd& m) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(x.cols), m.cols());
  if (x.sparse) {
    for (std::size_t r = 0; r < x.rows(); r++)
      for (std::uint64_t idx = x.indptr[r]; idx < x.indptr[r + 1]; idx++)
        out.row(x.indices[idx]) += x.values[idx] * m.row(static_cast<Eigen::Index>(r));
  } else {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        xd(x.dense.data(), static_cast<Eigen::Index>(x.rows()),
           static_cast<Eigen::Index>(x.cols));
    out = xd.transpose() * m;
  }
  return out;
}

Eigen::VectorXd column_means(const FeatureMatrix& x) {
  Eigen::VectorXd mu = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(x.cols));
  if (x.sparse) {
    for (std::size_t r = 0; r < x.rows(); r++)
      for (std::uint64_t idx = x.indptr[r]; idx < x.indptr[r + 1]; idx++)
        mu(x.indices[idx]) += x.values[idx];
  } else {
    for (std::size_t r = 0; r < x.rows(); r++)
      for (std::size_t c = 0; c < x.cols; c++)
        mu(static_cast<Eigen::Index>(c)) += x.dense[r * x.cols + c];
  }
  return mu / static_cast<double>(x.rows());
}

// Centered product: (X - 1 mu^T) * M = X*M - 1 (mu^T M)
Eigen::MatrixXd centered_right(const FeatureMatrix& x, const Eigen::VectorXd& mu,
                               const Eigen::MatrixXd& m) {
  Eigen::MatrixXd y = right_multiply(x, m);
  Eigen::RowVectorXd shift = mu.transpose() * m;
  y.rowwise() -= shift;
  return y;
}

// (X - 1 mu^T)^T * M = X^T M - mu (1^T M)
Eigen::MatrixXd centered_left_transposed(const FeatureMatrix& x, const Eigen::VectorXd& mu,
                                         const Eigen::MatrixXd& m) {
  Eigen::MatrixXd y = left_multiply_transposed(x, m);
  Eigen::RowVectorXd colsum = m.colwise().sum();
  y -= mu * colsum;
  return y;
}

void fix_component_signs(Eigen::MatrixXd& components) {
  for (Eigen::Index i = 0; i < components.rows(); i++) {
    Eigen::Index j = 0;
    components.row(i).cwiseAbs().maxCoeff(&j);
    if (components(i, j) < 0) components.row(i) = -components.row(i);
  }
}

}  // namespace

std::uint64_t PcaModel::content_hash() const {
  Fnv1a h;
  h.update_pod(seed);
  h.update_pod(input_axis_hash);
  h.update(components.data(), static_cast<std::size_t>(components.size()) * sizeof(double));
  h.update(mean.data(), static_cast<std::size_t>(mean.size()) * sizeof(double));
  return h.digest();
}

PcaModel fit_pca(const FeatureMatrix& features, std::size_t k, std::uint64_t seed,
                 std::size_t oversample, std::size_t power_iterations) {
  const std::size_t rows = features.rows();
  const std::size_t cols = features.cols;
  if (k == 0 || k > std::min(rows, cols))
    throw std::runtime_error("PCA component count " + std::to_string(k) +
                             " out of range for a " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " matrix");
  if (features.weighting == Weighting::binary)
    throw std::runtime_error("PCA expects tfidf or frequency input, not binary");

  Eigen::VectorXd mu = column_means(features);

  const std::size_t sketch = std::min(k + oversample, std::min(rows, cols));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXd omega(static_cast<Eigen::Index>(cols), static_cast<Eigen::Index>(sketch));
  for (Eigen::Index i = 0; i < omega.rows(); i++)
    for (Eigen::Index j = 0; j < omega.cols(); j++) omega(i, j) = gauss(rng);

  // randomized range finder with power iterations on the centered operator
  Eigen::MatrixXd y = centered_right(features, mu, omega);
  auto orthonormalize = [](const Eigen::MatrixXd& m) -> Eigen::MatrixXd {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), m.cols());
  };
  Eigen::MatrixXd q = orthonormalize(y);
  for (std::size_t it = 0; it < power_iterations; it++) {
    Eigen::MatrixXd z = orthonormalize(centered_left_transposed(features, mu, q));
    q = orthonormalize(centered_right(features, mu, z));
  }

  // B = Q^T (X - 1 mu^T), small (sketch x J)
  Eigen::MatrixXd b = centered_left_transposed(features, mu, q).transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(b, Eigen::ComputeThinV);

  PcaModel model;
  model.seed = seed;
  model.input_axis_hash = features.axis_hash;
  model.mean = mu;
  model.components = svd.matrixV().leftCols(static_cast<Eigen::Index>(k)).transpose();
  fix_component_signs(model.components);
  model.explained_variance.resize(static_cast<Eigen::Index>(k));
  const double denom = rows > 1 ? static_cast<double>(rows - 1) : 1.0;
  for (std::size_t i = 0; i < k; i++) {
    double s = svd.singularValues()(static_cast<Eigen::Index>(i));
    model.explained_variance(static_cast<Eigen::Index>(i)) = s * s / denom;
  }
  return model;
}

FeatureMatrix transform_pca(const PcaModel& model, const FeatureMatrix& features) {
  if (features.cols != static_cast<std::size_t>(model.components.cols()))
    throw std::runtime_error("PCA transform dimension mismatch: model expects " +
                             std::to_string(model.components.cols()) + " features, got " +
                             std::to_string(features.cols));
  Eigen::MatrixXd z = centered_right(features, model.mean, model.components.transpose());
  FeatureMatrix out = FeatureMatrix::from_dense(z, features.row_ids, Axis::pca_component,
                                                model.content_hash());
  return out;
}

Eigen::MatrixXd inverse_transform_pca(const PcaModel& model, const Eigen::MatrixXd& reduced) {
  Eigen::MatrixXd x = reduced * model.components;
  x.rowwise() += model.mean.transpose();
  return x;
}

void save_pca(const PcaModel& m, const std::filesystem::path& path) {
  atomic_write(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.header("pca_model");
    w.u64(m.seed);
    w.u64(m.input_axis_hash);
    w.u64(m.k());
    w.u64(static_cast<std::uint64_t>(m.components.cols()));
    w.f64_array(m.components.data(), static_cast<std::size_t>(m.components.size()));
    w.f64_array(m.mean.data(), static_cast<std::size_t>(m.mean.size()));
    w.f64_array(m.explained_variance.data(),
                static_cast<std::size_t>(m.explained_variance.size()));
  });
}

PcaModel load_pca(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open PCA model: " + path.string());
  BinaryReader r(is, path.string());
  r.header("pca_model");
  PcaModel m;
  m.seed = r.u64();
  m.input_axis_hash = r.u64();
  std::uint64_t k = r.u64();
  std::uint64_t j = r.u64();
  auto comp = r.f64_array();
  auto mean = r.f64_array();
  auto ev = r.f64_array();
  if (comp.size() != k * j || mean.size() != j || ev.size() != k)
    throw std::runtime_error("inconsistent PCA model sections in " + path.string());
  m.components = Eigen::Map<Eigen::MatrixXd>(comp.data(), static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(j));
  m.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(j));
  m.explained_variance = Eigen::Map<Eigen::VectorXd>(ev.data(), static_cast<Eigen::Index>(k));
  return m;
}

}  // namespace trialrank

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trialrank/pca.hpp"

using namespace trialrank;

namespace {

std::vector<std::string> ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; i++) out.push_back("T" + std::to_string(100 + i));
  return out;
}

// n points lying exactly on a plane spanned by two directions in R^j.
FeatureMatrix planar_cloud(std::size_t n, std::size_t j, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd a(j), b(j), origin(j);
  for (std::size_t c = 0; c < j; c++) {
    a[c] = gauss(rng);
    b[c] = gauss(rng);
    origin[c] = gauss(rng);
  }
  Eigen::MatrixXd m(n, j);
  for (std::size_t r = 0; r < n; r++)
    m.row(r) = (origin + gauss(rng) * a + gauss(rng) * b).transpose();
  return FeatureMatrix::from_dense(m, ids(n), Axis::vocabulary_term, 42);
}

}  // namespace

TEST_CASE("rank-2 data is reconstructed exactly by two components") {
  auto cloud = planar_cloud(60, 25, 3);
  auto model = fit_pca(cloud, 2, 0);
  auto reduced = transform_pca(model, cloud);
  auto back = inverse_transform_pca(model, reduced.to_dense());
  double err = (back - cloud.to_dense()).cwiseAbs().maxCoeff();
  CHECK(err < 1e-10);
  // everything past the plane carries no variance
  CHECK(model.explained_variance[0] > model.explained_variance[1]);
  CHECK(model.explained_variance[1] > 1e-8);
}

TEST_CASE("components are orthonormal") {
  auto cloud = planar_cloud(50, 12, 9);
  auto model = fit_pca(cloud, 4, 1);
  Eigen::MatrixXd gram = model.components * model.components.transpose();
  CHECK((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("explained variance matches the exact covariance spectrum") {
  auto cloud = planar_cloud(80, 10, 21);
  Eigen::MatrixXd x = cloud.to_dense();
  Eigen::MatrixXd centered = x.rowwise() - x.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered);
  auto model = fit_pca(cloud, 3, 0);
  for (int i = 0; i < 3; i++) {
    double exact = svd.singularValues()[i] * svd.singularValues()[i] / (80 - 1);
    CHECK(model.explained_variance[i] == doctest::Approx(exact).epsilon(1e-8));
  }
}

TEST_CASE("sparse input is centered implicitly") {
  // Sparse matrix with a strong mean; fitting must agree with the dense
  // explicitly-centered reference to numerical precision.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> unif(0.5, 1.5);
  const std::size_t n = 40, j = 15;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(n, j);
  for (std::size_t r = 0; r < n; r++)
    for (std::size_t c = 0; c < j; c++)
      if ((r * 7 + c * 3) % 4 == 0) dense(r, c) = unif(rng);

  FeatureMatrix sparse;
  sparse.row_ids = ids(n);
  sparse.axis = Axis::vocabulary_term;
  sparse.weighting = Weighting::tfidf;
  sparse.cols = j;
  sparse.indptr.push_back(0);
  for (std::size_t r = 0; r < n; r++) {
    for (std::size_t c = 0; c < j; c++)
      if (dense(r, c) != 0.0) {
        sparse.indices.push_back(static_cast<std::uint32_t>(c));
        sparse.values.push_back(dense(r, c));
      }
    sparse.indptr.push_back(sparse.indices.size());
  }

  auto dense_fm = FeatureMatrix::from_dense(dense, ids(n), Axis::vocabulary_term, 0);
  auto ms = fit_pca(sparse, 3, 0);
  auto md = fit_pca(dense_fm, 3, 0);
  CHECK((ms.mean - md.mean).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ms.components - md.components).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("deterministic for a fixed seed") {
  auto cloud = planar_cloud(60, 25, 3);
  auto a = fit_pca(cloud, 5, 17);
  auto b = fit_pca(cloud, 5, 17);
  CHECK(a.content_hash() == b.content_hash());
  auto ta = transform_pca(a, cloud);
  auto tb = transform_pca(b, cloud);
  CHECK(ta.content_hash() == tb.content_hash());
}

TEST_CASE("transform tags its output with the model hash") {
  auto cloud = planar_cloud(30, 8, 1);
  auto model = fit_pca(cloud, 2, 0);
  auto reduced = transform_pca(model, cloud);
  CHECK(reduced.axis == Axis::pca_component);
  CHECK(!reduced.sparse);
  CHECK(reduced.axis_hash == model.content_hash());
  CHECK(reduced.cols == 2);
  CHECK(reduced.row_ids == cloud.row_ids);
}

TEST_CASE("binary weighting and out-of-range k are rejected") {
  auto cloud = planar_cloud(20, 6, 2);
  FeatureMatrix binary = cloud;
  binary.weighting = Weighting::binary;
  CHECK_THROWS_AS(fit_pca(binary, 2), std::runtime_error);
  CHECK_THROWS_AS(fit_pca(cloud, 0), std::runtime_error);
  CHECK_THROWS_AS(fit_pca(cloud, 7), std::runtime_error);  // k > min(n, j)
}

TEST_CASE("model round-trips through its container") {
  auto cloud = planar_cloud(30, 10, 4);
  auto model = fit_pca(cloud, 3, 12);
  auto path = std::filesystem::temp_directory_path() / "trialrank_pca.bin";
  save_pca(model, path);
  auto back = load_pca(path);
  CHECK(back.content_hash() == model.content_hash());
  CHECK(back.seed == 12);
  CHECK((back.components - model.components).cwiseAbs().maxCoeff() == 0.0);
}

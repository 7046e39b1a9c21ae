// Compares the serial reference kernels against the OpenMP paths on a
// synthetic workload and reports wall times plus agreement.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>

#include <omp.h>

#include "trialrank/matfac.hpp"
#include "trialrank/simrank.hpp"

using namespace trialrank;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

FeatureMatrix random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < m.rows(); i++)
    for (Eigen::Index j = 0; j < m.cols(); j++) m(i, j) = unif(rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < rows; i++) ids.push_back("T" + std::to_string(1000 + i));
  return FeatureMatrix::from_dense(m, ids, Axis::pca_component, 0);
}

}  // namespace

int main() {
  std::printf("threads: %d\n", omp_get_max_threads());

  // simrank scoring
  {
    const std::size_t rows = 20000, cols = 200;
    FeatureMatrix features = random_dense(rows, cols, 7);
    std::set<std::string> included;
    for (int i = 0; i < 20; i++) included.insert("T" + std::to_string(1000 + i * 37));

    auto t0 = std::chrono::steady_clock::now();
    auto serial = score_candidates(features, included, SimilarityMetric::cosine,
                                   Aggregation::mean, Exec::serial);
    double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    auto parallel = score_candidates(features, included, SimilarityMetric::cosine,
                                     Aggregation::mean, Exec::parallel);
    double tp = seconds_since(t0);

    double max_diff = 0;
    for (std::size_t i = 0; i < serial.size(); i++)
      max_diff = std::max(max_diff, std::abs(serial[i] - parallel[i]));
    std::printf("simrank %zux%zu: serial %.3fs, parallel %.3fs, speedup %.2fx, max diff %g\n",
                rows, cols, ts, tp, ts / tp, max_diff);
  }

  // matfac gradients + loss
  {
    const std::size_t u = 2000, j = 300, v = 40, k = 30;
    Hyperparams hp;
    hp.k = k;
    hp.seed = 11;
    FactorModel model = init_model(u, j, v, hp);
    FeatureMatrix features = random_dense(u, j, 13);
    Eigen::MatrixXd r = features.to_dense();
    LinkMatrix t;
    t.trial_ids = features.row_ids;
    for (std::size_t i = 0; i < v; i++) t.review_ids.push_back("R" + std::to_string(i));
    std::mt19937_64 rng(17);
    std::uniform_int_distribution<std::uint32_t> pick_u(0, static_cast<std::uint32_t>(u - 1));
    for (std::uint32_t vi = 0; vi < v; vi++)
      for (int l = 0; l < 10; l++) t.links.push_back({pick_u(rng), vi, LinkMask::train});

    auto t0 = std::chrono::steady_clock::now();
    Gradients gs = gradients(model, r, t, Exec::serial);
    double ls = loss(model, r, t, Exec::serial);
    double ts = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    Gradients gp = gradients(model, r, t, Exec::parallel);
    double lp = loss(model, r, t, Exec::parallel);
    double tp = seconds_since(t0);

    double max_diff = std::max({(gs.dp - gp.dp).cwiseAbs().maxCoeff(),
                                (gs.dq - gp.dq).cwiseAbs().maxCoeff(),
                                (gs.dw - gp.dw).cwiseAbs().maxCoeff(),
                                std::abs(ls - lp)});
    std::printf("matfac grad %zux%zux%zu k=%zu: serial %.3fs, parallel %.3fs, "
                "speedup %.2fx, max diff %g\n",
                u, j, v, k, ts, tp, ts / tp, max_diff);
  }
  return 0;
}

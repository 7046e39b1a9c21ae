#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trialrank/matfac.hpp"

using namespace trialrank;

namespace {

std::vector<std::string> trial_ids(std::size_t n) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; i++) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "T%03zu", i);
    out.push_back(buf);
  }
  return out;
}

LinkMatrix random_links(std::size_t trials, std::size_t reviews,
                        std::size_t per_review, std::uint64_t seed) {
  LinkMatrix t;
  t.trial_ids = trial_ids(trials);
  for (std::size_t v = 0; v < reviews; v++) t.review_ids.push_back("R" + std::to_string(v));
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(trials - 1));
  for (std::uint32_t v = 0; v < reviews; v++)
    for (std::size_t l = 0; l < per_review; l++)
      t.links.push_back({pick(rng), v, LinkMask::train});
  return t;
}

Eigen::MatrixXd random_features(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.rows(); i++)
    for (Eigen::Index j = 0; j < m.cols(); j++) m(i, j) = unif(rng);
  return m;
}

// Central finite difference of the loss along one coordinate. `param`
// must alias one of the model's factor matrices.
double fd(FactorModel& model, Eigen::MatrixXd& param, Eigen::Index i, Eigen::Index j,
          const Eigen::MatrixXd& r, const LinkMatrix& t, double h = 1e-6) {
  double orig = param(i, j);
  param(i, j) = orig + h;
  double up = loss(model, r, t, Exec::serial);
  param(i, j) = orig - h;
  double down = loss(model, r, t, Exec::serial);
  param(i, j) = orig;
  return (up - down) / (2 * h);
}

}  // namespace

TEST_CASE("loss on a one-cell instance matches arithmetic") {
  // U = J = V = K = 1; p = 2, q = 3, w = 5; r = 4; one train link t = 1.
  Hyperparams hp;
  hp.k = 1;
  hp.lambda = 0.5;
  hp.lambda_t = 2.0;
  FactorModel model = init_model(1, 1, 1, hp);
  model.p(0, 0) = 2;
  model.q(0, 0) = 3;
  model.w(0, 0) = 5;
  Eigen::MatrixXd r(1, 1);
  r << 4;
  LinkMatrix t;
  t.trial_ids = {"T000"};
  t.review_ids = {"R0"};
  t.links.push_back({0, 0, LinkMask::train});
  // reconstruction: (6-4)^2/2 = 2; link: 2/2 * (10-1)^2 = 81; reg: 0.5/2 * 38 = 9.5
  CHECK(loss(model, r, t, Exec::serial) == doctest::Approx(92.5).epsilon(1e-14));
  CHECK(loss(model, r, t, Exec::parallel) == doctest::Approx(92.5).epsilon(1e-14));
}

TEST_CASE("analytic gradients match central finite differences") {
  Hyperparams hp;
  hp.k = 4;
  hp.lambda = 0.01;
  hp.lambda_t = 0.5;
  hp.seed = 3;
  hp.init_scale = 0.5;
  FactorModel model = init_model(12, 9, 5, hp);
  Eigen::MatrixXd r = random_features(12, 9, 7);
  LinkMatrix t = random_links(12, 5, 4, 11);

  Gradients g = gradients(model, r, t, Exec::serial);
  std::mt19937_64 rng(23);
  auto probe = [&](Eigen::MatrixXd& param, const Eigen::MatrixXd& grad) {
    std::uniform_int_distribution<Eigen::Index> pi(0, param.rows() - 1);
    std::uniform_int_distribution<Eigen::Index> pj(0, param.cols() - 1);
    for (int n = 0; n < 12; n++) {
      Eigen::Index i = pi(rng), j = pj(rng);
      double numeric = fd(model, param, i, j, r, t);
      CAPTURE(i);
      CAPTURE(j);
      CHECK(grad(i, j) == doctest::Approx(numeric).epsilon(1e-6));
    }
  };
  probe(model.p, g.dp);
  probe(model.q, g.dq);
  probe(model.w, g.dw);
}

TEST_CASE("link data influences P and W but never Q") {
  Hyperparams hp;
  hp.k = 3;
  hp.lambda = 0.1;
  hp.lambda_t = 0.5;
  hp.seed = 1;
  hp.init_scale = 0.3;
  FactorModel model = init_model(8, 6, 3, hp);
  Eigen::MatrixXd r = random_features(8, 6, 2);
  LinkMatrix with_links = random_links(8, 3, 3, 5);
  LinkMatrix no_links = with_links;
  no_links.links.clear();

  Gradients a = gradients(model, r, with_links, Exec::serial);
  Gradients b = gradients(model, r, no_links, Exec::serial);
  CHECK((a.dq - b.dq).cwiseAbs().maxCoeff() == 0.0);  // Q only sees R
  CHECK((a.dp - b.dp).cwiseAbs().maxCoeff() > 0.0);
  // with no train links W sees only its regularizer
  CHECK((b.dw - hp.lambda * model.w).cwiseAbs().maxCoeff() == 0.0);
  CHECK((a.dw - b.dw).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("serial and parallel gradients are bit-identical") {
  Hyperparams hp;
  hp.k = 6;
  hp.seed = 9;
  hp.init_scale = 0.2;
  hp.lambda_t = 0.3;
  FactorModel model = init_model(40, 25, 8, hp);
  Eigen::MatrixXd r = random_features(40, 25, 4);
  LinkMatrix t = random_links(40, 8, 5, 6);
  Gradients gs = gradients(model, r, t, Exec::serial);
  Gradients gp = gradients(model, r, t, Exec::parallel);
  CHECK((gs.dp - gp.dp).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gs.dq - gp.dq).cwiseAbs().maxCoeff() == 0.0);
  CHECK((gs.dw - gp.dw).cwiseAbs().maxCoeff() == 0.0);
  CHECK(loss(model, r, t, Exec::serial) == loss(model, r, t, Exec::parallel));
}

TEST_CASE("fit drives the RMSE down and returns the best snapshot") {
  Hyperparams hp;
  hp.k = 4;
  hp.learning_rate = 0.02;
  hp.max_iterations = 300;
  hp.seed = 2;
  Eigen::MatrixXd r = random_features(20, 10, 8) * 0.3;
  auto features = FeatureMatrix::from_dense(r, trial_ids(20), Axis::pca_component, 0);
  LinkMatrix t = random_links(20, 4, 4, 3);
  FactorModel model = fit(features, t, hp, Exec::serial);
  REQUIRE(!model.trace.empty());
  CHECK(model.trace.back() < model.trace.front());
  double best = model.trace[model.best_iteration];
  for (double v : model.trace) CHECK(best <= v);
  CHECK(model.feature_hash == features.content_hash());
  CHECK(model.link_hash == t.content_hash());
}

TEST_CASE("fit is deterministic and thread-count independent") {
  Hyperparams hp;
  hp.k = 3;
  hp.learning_rate = 0.02;
  hp.max_iterations = 120;
  hp.seed = 14;
  Eigen::MatrixXd r = random_features(15, 8, 1) * 0.3;
  auto features = FeatureMatrix::from_dense(r, trial_ids(15), Axis::pca_component, 0);
  LinkMatrix t = random_links(15, 3, 3, 2);
  auto a = fit(features, t, hp, Exec::serial);
  auto b = fit(features, t, hp, Exec::parallel);
  CHECK(a.content_hash() == b.content_hash());
  CHECK((a.p - b.p).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("a review with no train links is rejected") {
  Hyperparams hp;
  hp.k = 2;
  auto features = FeatureMatrix::from_dense(random_features(6, 4, 1), trial_ids(6),
                                            Axis::pca_component, 0);
  LinkMatrix t;
  t.trial_ids = features.row_ids;
  t.review_ids = {"R0", "R1"};
  t.links.push_back({0, 0, LinkMask::train});
  t.links.push_back({1, 1, LinkMask::test});  // R1 has only a test link
  CHECK_THROWS_WITH_AS(fit(features, t, hp), doctest::Contains("R1"),
                       std::runtime_error);
}

TEST_CASE("divergence raises a learning-rate hint") {
  Hyperparams hp;
  hp.k = 4;
  hp.learning_rate = 50.0;  // wildly too large
  hp.max_iterations = 200;
  hp.seed = 4;
  auto features = FeatureMatrix::from_dense(random_features(10, 6, 3), trial_ids(10),
                                            Axis::pca_component, 0);
  LinkMatrix t = random_links(10, 2, 3, 9);
  CHECK_THROWS_WITH_AS(fit(features, t, hp), doctest::Contains("learning_rate"),
                       std::runtime_error);
}

TEST_CASE("hyperparameter validation") {
  Hyperparams hp;
  CHECK_NOTHROW(hp.validate());
  hp.k = 0;
  CHECK_THROWS_AS(hp.validate(), std::runtime_error);
  hp = {};
  hp.lambda = -1;
  CHECK_THROWS_AS(hp.validate(), std::runtime_error);
  hp = {};
  hp.learning_rate = 0;
  CHECK_THROWS_AS(hp.validate(), std::runtime_error);
}

TEST_CASE("rank_for_review scores from P W^T and skips excluded trials") {
  Hyperparams hp;
  hp.k = 2;
  FactorModel model = init_model(4, 3, 2, hp);
  model.p << 1, 0, 0, 1, 1, 1, 0, 0;
  model.w << 1, 0, 0, 1;
  LinkMatrix t;
  t.trial_ids = trial_ids(4);
  t.review_ids = {"R0", "R1"};
  Eigen::MatrixXd scores = score_reviews(model);
  // column 0 of P W^T is (1, 0, 1, 0)
  CHECK(scores(0, 0) == 1.0);
  CHECK(scores(1, 0) == 0.0);
  auto list = rank_for_review(scores, t, 0, {"T000"});
  REQUIRE(list.entries.size() == 3);
  CHECK(list.entries[0].trial_id == "T002");  // score 1
  CHECK(list.entries[0].rank == 1);
  CHECK(list.review_id == "R0");
}

TEST_CASE("model and trace round-trip through their files") {
  Hyperparams hp;
  hp.k = 3;
  hp.learning_rate = 0.02;
  hp.max_iterations = 40;
  hp.seed = 6;
  auto features = FeatureMatrix::from_dense(random_features(10, 5, 5) * 0.3,
                                            trial_ids(10), Axis::pca_component, 0);
  LinkMatrix t = random_links(10, 2, 3, 1);
  auto model = fit(features, t, hp, Exec::serial);

  auto dir = std::filesystem::temp_directory_path();
  save_factor_model(model, dir / "trialrank_mf.bin");
  auto back = load_factor_model(dir / "trialrank_mf.bin");
  CHECK(back.content_hash() == model.content_hash());
  CHECK(back.best_iteration == model.best_iteration);
  CHECK(back.trace == model.trace);
  CHECK(back.hyperparams.k == 3);

  save_trace_csv(model, dir / "trialrank_trace.csv");
  std::ifstream in(dir / "trialrank_trace.csv");
  std::string line;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
  }
  CHECK(line == "iteration,rmse");
  std::size_t lines = 0;
  while (std::getline(in, line)) lines++;
  CHECK(lines == model.trace.size());
}

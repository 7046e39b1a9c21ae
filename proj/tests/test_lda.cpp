#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "trialrank/lda.hpp"

using namespace trialrank;

namespace {

// Documents drawn from k disjoint vocabularies of `words_per_topic` terms
// each: document d uses only the words of topic d % k. The planted
// structure is as separable as LDA input gets.
FeatureMatrix planted_corpus(std::size_t k, std::size_t words_per_topic,
                             std::size_t docs_per_topic, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t j = k * words_per_topic;
  FeatureMatrix m;
  m.axis = Axis::vocabulary_term;
  m.weighting = Weighting::frequency;
  m.cols = j;
  m.indptr.push_back(0);
  std::uniform_int_distribution<std::uint32_t> count(1, 6);
  for (std::size_t t = 0; t < k; t++) {
    for (std::size_t d = 0; d < docs_per_topic; d++) {
      m.row_ids.push_back("T" + std::to_string(t * docs_per_topic + d));
      for (std::size_t w = 0; w < words_per_topic; w++) {
        m.indices.push_back(static_cast<std::uint32_t>(t * words_per_topic + w));
        m.values.push_back(static_cast<double>(count(rng)));
      }
      m.indptr.push_back(m.indices.size());
    }
  }
  return m;
}

// Fraction of a topic's probability mass that falls on its own word block.
double block_purity(const LdaModel& model, std::size_t words_per_topic) {
  const std::size_t k = model.k();
  // Greedy matching: each fitted topic claims the block it weights most.
  double total = 0;
  for (std::size_t t = 0; t < k; t++) {
    double best = 0;
    for (std::size_t b = 0; b < k; b++) {
      double mass = model.topic_term
                        .row(t)
                        .segment(b * words_per_topic, words_per_topic)
                        .sum();
      best = std::max(best, mass);
    }
    total += best;
  }
  return total / static_cast<double>(k);
}

}  // namespace

TEST_CASE("topic rows are proper distributions") {
  auto corpus = planted_corpus(3, 8, 10, 1);
  auto model = fit_lda(corpus, 3, 0, 0.01, 300, 7);
  for (std::size_t t = 0; t < 3; t++) {
    CHECK(model.topic_term.row(t).sum() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(model.topic_term.row(t).minCoeff() > 0.0);  // beta smoothing
  }
  CHECK(model.alpha == doctest::Approx(50.0 / 3.0));  // alpha <= 0 default
}

TEST_CASE("planted disjoint topics are recovered") {
  auto corpus = planted_corpus(3, 10, 20, 2);
  auto model = fit_lda(corpus, 3, 0, 0.01, 500, 11);
  CHECK(block_purity(model, 10) > 0.95);
}

TEST_CASE("fold-in lands on the planted topic") {
  auto corpus = planted_corpus(3, 10, 20, 3);
  auto model = fit_lda(corpus, 3, 0, 0.01, 500, 5);
  // a fresh document made purely of block-1 words
  std::vector<std::pair<std::uint32_t, std::uint32_t>> doc;
  for (std::uint32_t w = 10; w < 20; w++) doc.push_back({w, 3});
  auto inf = infer_lda(model, doc, 99);
  CHECK(!inf.empty_document);
  CHECK(inf.distribution.sum() == doctest::Approx(1.0).epsilon(1e-12));
  Eigen::Index argmax;
  inf.distribution.maxCoeff(&argmax);
  // whichever fitted topic owns block 1 should win
  Eigen::Index owner;
  model.topic_term.block(0, 10, 3, 10).rowwise().sum().maxCoeff(&owner);
  CHECK(argmax == owner);
  // 30 tokens against alpha = 50/3 smoothing caps the winner near
  // (30 + alpha) / (30 + 50) ~= 0.58
  CHECK(inf.distribution[argmax] > 0.5);
}

TEST_CASE("empty document falls back to uniform, flagged") {
  auto corpus = planted_corpus(2, 5, 8, 4);
  auto model = fit_lda(corpus, 2, 0, 0.01, 100, 1);
  auto inf = infer_lda(model, {}, 0);
  CHECK(inf.empty_document);
  CHECK(inf.distribution[0] == doctest::Approx(0.5));
  CHECK(inf.distribution[1] == doctest::Approx(0.5));
}

TEST_CASE("deterministic for a fixed seed") {
  auto corpus = planted_corpus(2, 6, 10, 5);
  auto a = fit_lda(corpus, 2, 0, 0.01, 150, 42);
  auto b = fit_lda(corpus, 2, 0, 0.01, 150, 42);
  CHECK(a.content_hash() == b.content_hash());
  auto c = fit_lda(corpus, 2, 0, 0.01, 150, 43);
  CHECK(c.content_hash() != a.content_hash());
}

TEST_CASE("transform: serial and parallel agree bitwise") {
  auto corpus = planted_corpus(3, 6, 12, 6);
  auto model = fit_lda(corpus, 3, 0, 0.01, 200, 8);
  auto ser = lda_transform(model, corpus, 21, Exec::serial);
  auto par = lda_transform(model, corpus, 21, Exec::parallel);
  CHECK(ser.content_hash() == par.content_hash());
  CHECK(par.axis == Axis::lda_topic);
  CHECK(!par.sparse);
  CHECK(par.cols == 3);
  CHECK(par.axis_hash == model.content_hash());
  for (std::size_t r = 0; r < par.rows(); r++) {
    double sum = 0;
    for (std::size_t c = 0; c < 3; c++) sum += par.at(r, c);
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("non-frequency and non-integral input rejected") {
  auto corpus = planted_corpus(2, 4, 6, 7);
  FeatureMatrix tfidf = corpus;
  tfidf.weighting = Weighting::tfidf;
  CHECK_THROWS_AS(fit_lda(tfidf, 2), std::runtime_error);
  FeatureMatrix fractional = corpus;
  fractional.values[0] = 1.5;
  CHECK_THROWS_AS(fit_lda(fractional, 2), std::runtime_error);
  CHECK_THROWS_AS(fit_lda(corpus, 0), std::runtime_error);
}

TEST_CASE("model round-trips through its container") {
  auto corpus = planted_corpus(2, 5, 8, 8);
  auto model = fit_lda(corpus, 2, 0.5, 0.02, 120, 3);
  auto path = std::filesystem::temp_directory_path() / "trialrank_lda.bin";
  save_lda(model, path);
  auto back = load_lda(path);
  CHECK(back.content_hash() == model.content_hash());
  CHECK(back.alpha == 0.5);
  CHECK(back.beta == 0.02);
  CHECK(back.sweeps == 120);
  CHECK((back.topic_term - model.topic_term).cwiseAbs().maxCoeff() == 0.0);
}

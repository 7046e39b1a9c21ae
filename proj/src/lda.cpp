#include "trialrank/lda.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>
#include <vector>

#include <omp.h>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"

namespace trialrank {

namespace {

// token stream per document, word id repeated `count` times
std::vector<std::vector<std::uint32_t>> expand_counts(const FeatureMatrix& features) {
  if (features.weighting != Weighting::frequency)
    throw std::runtime_error("LDA consumes word counts; input weighting must be 'frequency'");
  if (!features.sparse)
    throw std::runtime_error("LDA input must be a sparse frequency matrix");
  std::vector<std::vector<std::uint32_t>> docs(features.rows());
  for (std::size_t d = 0; d < features.rows(); d++) {
    for (std::uint64_t idx = features.indptr[d]; idx < features.indptr[d + 1]; idx++) {
      double v = features.values[idx];
      if (v <= 0 || v != std::floor(v))
        throw std::runtime_error("LDA input contains a non-count value");
      for (std::uint64_t rep = 0; rep < static_cast<std::uint64_t>(v); rep++)
        docs[d].push_back(features.indices[idx]);
    }
  }
  return docs;
}

std::size_t sample_discrete(const std::vector<double>& weights, double total,
                            std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, total);
  double u = unif(rng);
  double acc = 0;
  for (std::size_t i = 0; i < weights.size(); i++) {
    acc += weights[i];
    if (u < acc) return i;
  }
  return weights.size() - 1;
}

}  // namespace

std::uint64_t LdaModel::content_hash() const {
  Fnv1a h;
  h.update_pod(alpha);
  h.update_pod(beta);
  h.update_pod(sweeps);
  h.update_pod(seed);
  h.update_pod(input_axis_hash);
  h.update(topic_term.data(), static_cast<std::size_t>(topic_term.size()) * sizeof(double));
  return h.digest();
}

LdaModel fit_lda(const FeatureMatrix& features, std::size_t k, double alpha,
                 double beta, std::uint64_t sweeps, std::uint64_t seed) {
  if (k < 1) throw std::runtime_error("LDA topic count must be >= 1");
  if (beta <= 0) throw std::runtime_error("LDA beta must be positive");
  if (alpha <= 0) alpha = 50.0 / static_cast<double>(k);

  auto docs = expand_counts(features);
  const std::size_t n_docs = docs.size();
  const std::size_t vocab = features.cols;

  std::vector<std::vector<std::uint32_t>> z(n_docs);
  std::vector<std::uint64_t> topic_count(k, 0);                   // n_k
  std::vector<std::uint64_t> topic_word(k * vocab, 0);            // n_kw
  std::vector<std::uint64_t> doc_topic(n_docs * k, 0);            // n_dk

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  for (std::size_t d = 0; d < n_docs; d++) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); i++) {
      std::size_t t = pick(rng);
      z[d][i] = static_cast<std::uint32_t>(t);
      topic_count[t]++;
      topic_word[t * vocab + docs[d][i]]++;
      doc_topic[d * k + t]++;
    }
  }

  const double vbeta = static_cast<double>(vocab) * beta;
  std::vector<double> weights(k);
  for (std::uint64_t sweep = 0; sweep < sweeps; sweep++) {
    for (std::size_t d = 0; d < n_docs; d++) {
      for (std::size_t i = 0; i < docs[d].size(); i++) {
        const std::uint32_t w = docs[d][i];
        const std::uint32_t old = z[d][i];
        topic_count[old]--;
        topic_word[old * vocab + w]--;
        doc_topic[d * k + old]--;
        double total = 0;
        for (std::size_t t = 0; t < k; t++) {
          double p = (static_cast<double>(doc_topic[d * k + t]) + alpha) *
                     (static_cast<double>(topic_word[t * vocab + w]) + beta) /
                     (static_cast<double>(topic_count[t]) + vbeta);
          weights[t] = p;
          total += p;
        }
        std::size_t t = sample_discrete(weights, total, rng);
        z[d][i] = static_cast<std::uint32_t>(t);
        topic_count[t]++;
        topic_word[t * vocab + w]++;
        doc_topic[d * k + t]++;
      }
    }
  }

  LdaModel model;
  model.alpha = alpha;
  model.beta = beta;
  model.sweeps = sweeps;
  model.seed = seed;
  model.input_axis_hash = features.axis_hash;
  model.topic_term.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(vocab));
  for (std::size_t t = 0; t < k; t++) {
    double denom = static_cast<double>(topic_count[t]) + vbeta;
    for (std::size_t w = 0; w < vocab; w++)
      model.topic_term(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(w)) =
          (static_cast<double>(topic_word[t * vocab + w]) + beta) / denom;
  }
  return model;
}

LdaInference infer_lda(const LdaModel& model,
                       const std::vector<std::pair<std::uint32_t, std::uint32_t>>& doc_counts,
                       std::uint64_t seed, std::uint64_t sweeps) {
  const std::size_t k = model.k();
  LdaInference out;
  out.distribution = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(k),
                                               1.0 / static_cast<double>(k));

  std::vector<std::uint32_t> words;
  for (const auto& [w, c] : doc_counts) {
    if (w >= model.vocab_size())
      throw std::runtime_error("LDA inference: word id out of vocabulary range");
    for (std::uint32_t rep = 0; rep < c; rep++) words.push_back(w);
  }
  if (words.empty()) {
    out.empty_document = true;
    return out;
  }

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, k - 1);
  std::vector<std::uint32_t> z(words.size());
  std::vector<std::uint64_t> doc_topic(k, 0);
  for (std::size_t i = 0; i < words.size(); i++) {
    std::size_t t = pick(rng);
    z[i] = static_cast<std::uint32_t>(t);
    doc_topic[t]++;
  }

  const std::uint64_t burn_in = sweeps / 2;
  std::vector<double> weights(k);
  std::vector<double> accum(k, 0.0);
  std::uint64_t kept = 0;
  for (std::uint64_t sweep = 0; sweep < sweeps; sweep++) {
    for (std::size_t i = 0; i < words.size(); i++) {
      const std::uint32_t w = words[i];
      doc_topic[z[i]]--;
      double total = 0;
      for (std::size_t t = 0; t < k; t++) {
        double p = (static_cast<double>(doc_topic[t]) + model.alpha) *
                   model.topic_term(static_cast<Eigen::Index>(t), w);
        weights[t] = p;
        total += p;
      }
      std::size_t t = sample_discrete(weights, total, rng);
      z[i] = static_cast<std::uint32_t>(t);
      doc_topic[t]++;
    }
    if (sweep >= burn_in) {
      const double denom = static_cast<double>(words.size()) +
                           static_cast<double>(k) * model.alpha;
      for (std::size_t t = 0; t < k; t++)
        accum[t] += (static_cast<double>(doc_topic[t]) + model.alpha) / denom;
      kept++;
    }
  }
  for (std::size_t t = 0; t < k; t++)
    out.distribution(static_cast<Eigen::Index>(t)) = accum[t] / static_cast<double>(kept);
  return out;
}

FeatureMatrix lda_transform(const LdaModel& model, const FeatureMatrix& features,
                            std::uint64_t seed, Exec exec) {
  if (features.cols != model.vocab_size())
    throw std::runtime_error("LDA transform dimension mismatch");
  const std::size_t n = features.rows();
  const std::size_t k = model.k();
  Eigen::MatrixXd theta(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));

  auto infer_row = [&](std::size_t d) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> counts;
    for (std::uint64_t idx = features.indptr[d]; idx < features.indptr[d + 1]; idx++)
      counts.emplace_back(features.indices[idx],
                          static_cast<std::uint32_t>(features.values[idx]));
    // per-document seed, independent of thread assignment
    auto res = infer_lda(model, counts, seed * 0x9e3779b97f4a7c15ull + d);
    theta.row(static_cast<Eigen::Index>(d)) = res.distribution.transpose();
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t d = 0; d < static_cast<std::int64_t>(n); d++)
      infer_row(static_cast<std::size_t>(d));
  } else {
    for (std::size_t d = 0; d < n; d++) infer_row(d);
  }

  FeatureMatrix out =
      FeatureMatrix::from_dense(theta, features.row_ids, Axis::lda_topic, model.content_hash());
  return out;
}

void save_lda(const LdaModel& m, const std::filesystem::path& path) {
  atomic_write(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.header("lda_model");
    w.f64(m.alpha);
    w.f64(m.beta);
    w.u64(m.sweeps);
    w.u64(m.seed);
    w.u64(m.input_axis_hash);
    w.u64(m.k());
    w.u64(m.vocab_size());
    w.f64_array(m.topic_term.data(), static_cast<std::size_t>(m.topic_term.size()));
  });
}

LdaModel load_lda(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open LDA model: " + path.string());
  BinaryReader r(is, path.string());
  r.header("lda_model");
  LdaModel m;
  m.alpha = r.f64();
  m.beta = r.f64();
  m.sweeps = r.u64();
  m.seed = r.u64();
  m.input_axis_hash = r.u64();
  std::uint64_t k = r.u64();
  std::uint64_t j = r.u64();
  auto tt = r.f64_array();
  if (tt.size() != k * j)
    throw std::runtime_error("inconsistent LDA model sections in " + path.string());
  m.topic_term = Eigen::Map<Eigen::MatrixXd>(tt.data(), static_cast<Eigen::Index>(k),
                                             static_cast<Eigen::Index>(j));
  return m;
}

}  // namespace trialrank

#include "trialrank/vectorize.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

#include <omp.h>

namespace trialrank {

namespace {

struct Row {
  std::vector<std::uint32_t> cols;
  std::vector<double> vals;
};

Row build_row(const std::string& text, const Vocabulary& vocab,
              Weighting weighting, const TfidfOptions& tfidf,
              const TokenizerOptions& tok) {
  std::map<std::uint32_t, double> counts;
  for (const auto& t : tokenize(text, tok)) {
    auto it = vocab.index.find(t);
    if (it != vocab.index.end()) counts[it->second] += 1.0;
  }
  Row row;
  row.cols.reserve(counts.size());
  row.vals.reserve(counts.size());
  for (auto& [c, tf] : counts) {
    double v = 0;
    switch (weighting) {
      case Weighting::binary:
        v = 1.0;
        break;
      case Weighting::frequency:
        v = tf;
        break;
      case Weighting::tfidf: {
        double n = static_cast<double>(vocab.n_documents);
        double df = static_cast<double>(vocab.document_frequency[c]);
        double idf = tfidf.smooth_idf ? std::log((1.0 + n) / (1.0 + df)) + 1.0
                                      : std::log(n / df) + 1.0;
        v = tf * idf;
        break;
      }
      case Weighting::none:
        throw std::runtime_error("weighting 'none' is not a vectorization mode");
    }
    row.cols.push_back(c);
    row.vals.push_back(v);
  }
  if (weighting == Weighting::tfidf && tfidf.l2_normalize) {
    double norm2 = 0;
    for (double v : row.vals) norm2 += v * v;
    if (norm2 > 0) {
      double inv = 1.0 / std::sqrt(norm2);
      for (double& v : row.vals) v *= inv;
    }
  }
  return row;
}

}  // namespace

FeatureMatrix vectorize_documents(const std::vector<std::string>& texts,
                                  const std::vector<std::string>& ids,
                                  const Vocabulary& vocab, Weighting weighting,
                                  const TfidfOptions& tfidf,
                                  const TokenizerOptions& tok, Exec exec) {
  if (texts.size() != ids.size())
    throw std::runtime_error("text/id count mismatch in vectorize");
  if (weighting == Weighting::none)
    throw std::runtime_error("unknown weighting for vectorize: none");

  std::vector<Row> rows(texts.size());
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(texts.size()); i++)
      rows[static_cast<std::size_t>(i)] =
          build_row(texts[static_cast<std::size_t>(i)], vocab, weighting, tfidf, tok);
  } else {
    for (std::size_t i = 0; i < texts.size(); i++)
      rows[i] = build_row(texts[i], vocab, weighting, tfidf, tok);
  }

  FeatureMatrix m;
  m.row_ids = ids;
  m.axis = Axis::vocabulary_term;
  m.weighting = weighting;
  m.cols = vocab.size();
  m.sparse = true;
  m.axis_hash = vocab.content_hash();
  m.indptr.push_back(0);
  for (const auto& row : rows) {
    m.indices.insert(m.indices.end(), row.cols.begin(), row.cols.end());
    m.values.insert(m.values.end(), row.vals.begin(), row.vals.end());
    m.indptr.push_back(m.indices.size());
  }
  return m;
}

FeatureMatrix vectorize(const Corpus& corpus, const Vocabulary& vocab,
                        Weighting weighting, const TfidfOptions& tfidf,
                        const TokenizerOptions& tok, Exec exec) {
  std::vector<std::string> texts, ids;
  texts.reserve(corpus.records.size());
  ids.reserve(corpus.records.size());
  for (const auto& r : corpus.records) {
    texts.push_back(r.concatenated_text());
    ids.push_back(r.id);
  }
  return vectorize_documents(texts, ids, vocab, weighting, tfidf, tok, exec);
}

}  // namespace trialrank

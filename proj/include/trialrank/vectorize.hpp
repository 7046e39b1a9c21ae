#pragma once

#include "trialrank/feature_matrix.hpp"
#include "trialrank/record.hpp"
#include "trialrank/vocabulary.hpp"

namespace trialrank {

struct TfidfOptions {
  // smoothed: idf = ln((1+N)/(1+df)) + 1; natural: idf = ln(N/df) + 1
  bool smooth_idf = true;
  bool l2_normalize = true;
};

// Vectorizes arbitrary documents against a frozen vocabulary; unseen terms
// are dropped. Rows come out in input order.
FeatureMatrix vectorize_documents(const std::vector<std::string>& texts,
                                  const std::vector<std::string>& ids,
                                  const Vocabulary& vocab, Weighting weighting,
                                  const TfidfOptions& tfidf = {},
                                  const TokenizerOptions& tok = {},
                                  Exec exec = Exec::parallel);

FeatureMatrix vectorize(const Corpus& corpus, const Vocabulary& vocab,
                        Weighting weighting, const TfidfOptions& tfidf = {},
                        const TokenizerOptions& tok = {},
                        Exec exec = Exec::parallel);

}  // namespace trialrank

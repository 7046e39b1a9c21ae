#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "trialrank/feature_matrix.hpp"

namespace trialrank {

enum class SimilarityMetric { cosine, euclidean, squared_euclidean };
enum class Aggregation { mean, max, centroid };

SimilarityMetric metric_from_string(const std::string& s);
Aggregation aggregation_from_string(const std::string& s);
const char* to_string(SimilarityMetric m);
const char* to_string(Aggregation a);

struct RankedEntry {
  std::string trial_id;
  double score;
  std::size_t rank;  // 1-based
};

struct RankedList {
  std::string review_id;
  std::vector<RankedEntry> entries;      // descending score, ties by id
  std::vector<std::string> excluded_ids;
};

// One score per corpus row, aligned with features.row_ids. Distances are
// negated so higher is always better. All-zero candidates score 0 under
// cosine.
std::vector<double> score_candidates(const FeatureMatrix& features,
                                     const std::set<std::string>& included,
                                     SimilarityMetric metric,
                                     Aggregation aggregation = Aggregation::mean,
                                     Exec exec = Exec::parallel);

// Descending score, ties broken by ascending trial id. `excluded` rows are
// dropped from the list (training links are never ranked).
RankedList rank(const std::vector<double>& scores,
                const std::vector<std::string>& ids,
                const std::set<std::string>& excluded,
                const std::string& review_id);

// "rank,trial_id,score" with '#' metadata header lines.
void save_ranked_list(const RankedList& list, const std::filesystem::path& path,
                      const std::string& metadata);
RankedList load_ranked_list(const std::filesystem::path& path);

}  // namespace trialrank

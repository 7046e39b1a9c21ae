#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace trialrank {

// Published full-corpus results for the best configurations. Not
// reproducible at fixture scale; written into report headers for
// comparison only, never asserted.
struct ReferenceResult {
  const char* method;
  double wss95;
  double median_rank;
  double recall_at_100;
};
inline constexpr ReferenceResult kReferenceResults[] = {
    {"matrix_factorisation (LDA-400, K=50)", 0.992, 59.0, 0.609},
    {"document_similarity (full tf-idf, squared Euclidean)", 0.995, 138.0, 0.428},
    {"manual_search", 0.970, 152.0, 0.321},
};

enum class WssVariant {
  global_depth,     // one screening depth shared by every review
  per_review_depth, // each review screens to its own required depth
  cohen             // global depth minus the (1 - recall_level) offset
};
WssVariant wss_variant_from_string(const std::string& s);
const char* to_string(WssVariant v);

struct LinkRank {
  std::string review_id;
  std::string trial_id;
  std::size_t rank;  // 1-based position in that review's candidate list
};

struct EvalReport {
  std::vector<LinkRank> link_ranks;
  double median_rank = 0;
  std::map<std::size_t, double> recall_at;  // N -> proportion
  double wss95 = 0;
  WssVariant wss_variant = WssVariant::global_depth;
  std::size_t n_candidates = 0;  // per-review candidate count
  std::string method_label;
};

// Standard median; even count averages the two central values.
double median_rank(const std::vector<std::size_t>& ranks);

// |{rank <= N}| / total_test_links
double recall_at(const std::vector<std::size_t>& ranks, std::size_t n,
                 std::size_t total_test_links);

// Proportion of candidates not screened when each review's list is
// screened deep enough to find recall_level of the test links.
double wss_at_recall(const std::vector<LinkRank>& ranks, double recall_level,
                     std::size_t n_candidates,
                     WssVariant variant = WssVariant::global_depth);

// Log-ish N grid used for recall@N curves, clipped to n_candidates.
std::vector<std::size_t> recall_grid(std::size_t n_candidates);

EvalReport evaluate(const std::vector<LinkRank>& link_ranks, std::size_t n_candidates,
                    const std::string& method_label,
                    WssVariant wss_variant = WssVariant::global_depth);

// Writes ranks.csv, recall_curve.csv and summary.csv (Table-style columns
// WSS@95%, Median Rank, Recall@100).
void emit_report(const EvalReport& report, const std::filesystem::path& out_dir);

// Summary for several methods side by side, one row per method.
void emit_summary(const std::vector<EvalReport>& reports,
                  const std::filesystem::path& path);

}  // namespace trialrank

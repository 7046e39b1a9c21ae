#include "trialrank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trialrank/container.hpp"

namespace trialrank {

WssVariant wss_variant_from_string(const std::string& s) {
  if (s == "global_depth") return WssVariant::global_depth;
  if (s == "per_review_depth") return WssVariant::per_review_depth;
  if (s == "cohen") return WssVariant::cohen;
  throw std::runtime_error("unknown WSS variant: " + s);
}

const char* to_string(WssVariant v) {
  switch (v) {
    case WssVariant::global_depth: return "global_depth";
    case WssVariant::per_review_depth: return "per_review_depth";
    case WssVariant::cohen: return "cohen";
  }
  return "?";
}

double median_rank(const std::vector<std::size_t>& ranks) {
  if (ranks.empty()) throw std::runtime_error("median of an empty rank list");
  std::vector<std::size_t> sorted = ranks;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  if (n % 2 == 1) return static_cast<double>(sorted[n / 2]);
  return (static_cast<double>(sorted[n / 2 - 1]) + static_cast<double>(sorted[n / 2])) / 2.0;
}

double recall_at(const std::vector<std::size_t>& ranks, std::size_t n,
                 std::size_t total_test_links) {
  if (n < 1) throw std::runtime_error("recall@N needs N >= 1");
  if (total_test_links == 0) throw std::runtime_error("recall@N with no test links");
  std::size_t found = 0;
  for (auto r : ranks)
    if (r <= n) found++;
  return static_cast<double>(found) / static_cast<double>(total_test_links);
}

double wss_at_recall(const std::vector<LinkRank>& ranks, double recall_level,
                     std::size_t n_candidates, WssVariant variant) {
  if (ranks.empty()) throw std::runtime_error("WSS of an empty rank list");
  if (recall_level <= 0.0 || recall_level > 1.0)
    throw std::runtime_error("WSS recall level must be in (0, 1]");
  if (n_candidates == 0) throw std::runtime_error("WSS needs n_candidates >= 1");

  std::set<std::string> review_set;
  for (const auto& lr : ranks) review_set.insert(lr.review_id);
  const double n_reviews = static_cast<double>(review_set.size());
  const double total_candidates = n_reviews * static_cast<double>(n_candidates);

  auto needed = [&](std::size_t total) {
    return static_cast<std::size_t>(
        std::ceil(recall_level * static_cast<double>(total) - 1e-12));
  };

  if (variant == WssVariant::per_review_depth) {
    std::map<std::string, std::vector<std::size_t>> per_review;
    for (const auto& lr : ranks) per_review[lr.review_id].push_back(lr.rank);
    double screened = 0;
    for (auto& [review, rs] : per_review) {
      std::sort(rs.begin(), rs.end());
      std::size_t depth = rs[needed(rs.size()) - 1];
      screened += static_cast<double>(std::min(depth, n_candidates));
    }
    return 1.0 - screened / total_candidates;
  }

  // global depth: smallest r* finding recall_level of all test links
  std::vector<std::size_t> all;
  all.reserve(ranks.size());
  for (const auto& lr : ranks) all.push_back(lr.rank);
  std::sort(all.begin(), all.end());
  std::size_t depth = std::min(all[needed(all.size()) - 1], n_candidates);
  double wss = 1.0 - (n_reviews * static_cast<double>(depth)) / total_candidates;
  if (variant == WssVariant::cohen) wss -= (1.0 - recall_level);
  return wss;
}

std::vector<std::size_t> recall_grid(std::size_t n_candidates) {
  static const std::size_t base[] = {1,    5,    10,   25,   50,    100,   200,
                                     400,  700,  1000, 2000, 5000,  10000, 20000,
                                     50000, 100000};
  std::vector<std::size_t> grid;
  for (auto n : base)
    if (n < n_candidates) grid.push_back(n);
  grid.push_back(n_candidates);
  return grid;
}

EvalReport evaluate(const std::vector<LinkRank>& link_ranks, std::size_t n_candidates,
                    const std::string& method_label, WssVariant wss_variant) {
  if (link_ranks.empty()) throw std::runtime_error("evaluate: no link ranks");
  EvalReport report;
  report.link_ranks = link_ranks;
  report.n_candidates = n_candidates;
  report.method_label = method_label;
  report.wss_variant = wss_variant;
  std::vector<std::size_t> ranks;
  ranks.reserve(link_ranks.size());
  for (const auto& lr : link_ranks) ranks.push_back(lr.rank);
  report.median_rank = median_rank(ranks);
  for (auto n : recall_grid(n_candidates))
    report.recall_at[n] = recall_at(ranks, n, ranks.size());
  report.wss95 = wss_at_recall(link_ranks, 0.95, n_candidates, wss_variant);
  return report;
}

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string reference_header() {
  std::ostringstream os;
  os << "# reference results from the published full-corpus experiments"
     << " (128,392 candidates; not reproducible at fixture scale):\n";
  for (const auto& ref : kReferenceResults)
    os << "#   " << ref.method << ": wss95=" << fmt(ref.wss95)
       << " median_rank=" << fmt(ref.median_rank)
       << " recall@100=" << fmt(ref.recall_at_100) << "\n";
  return os.str();
}

std::string summary_rows(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << reference_header();
  os << "method,wss95,median_rank,recall_at_100\n";
  for (const auto& r : reports) {
    auto it = r.recall_at.lower_bound(100);
    double r100 = it != r.recall_at.end() ? it->second : 1.0;
    os << r.method_label << ',' << fmt(r.wss95) << ',' << fmt(r.median_rank) << ','
       << fmt(r100) << '\n';
  }
  return os.str();
}

}  // namespace

void emit_report(const EvalReport& report, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  {
    std::ostringstream os;
    os << "review_id,trial_id,rank\n";
    for (const auto& lr : report.link_ranks)
      os << lr.review_id << ',' << lr.trial_id << ',' << lr.rank << '\n';
    atomic_write_text(out_dir / "ranks.csv", os.str());
  }
  {
    std::ostringstream os;
    os << "n,recall\n";
    for (const auto& [n, recall] : report.recall_at)
      os << n << ',' << fmt(recall) << '\n';
    atomic_write_text(out_dir / "recall_curve.csv", os.str());
  }
  emit_summary({report}, out_dir / "summary.csv");
}

void emit_summary(const std::vector<EvalReport>& reports,
                  const std::filesystem::path& path) {
  atomic_write_text(path, summary_rows(reports));
}

}  // namespace trialrank

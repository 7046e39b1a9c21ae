#include "trialrank/simrank.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "trialrank/container.hpp"

namespace trialrank {

SimilarityMetric metric_from_string(const std::string& s) {
  if (s == "cosine") return SimilarityMetric::cosine;
  if (s == "euclidean") return SimilarityMetric::euclidean;
  if (s == "squared_euclidean") return SimilarityMetric::squared_euclidean;
  throw std::runtime_error("unknown similarity metric: " + s);
}

Aggregation aggregation_from_string(const std::string& s) {
  if (s == "mean") return Aggregation::mean;
  if (s == "max") return Aggregation::max;
  if (s == "centroid") return Aggregation::centroid;
  throw std::runtime_error("unknown aggregation: " + s);
}

const char* to_string(SimilarityMetric m) {
  switch (m) {
    case SimilarityMetric::cosine: return "cosine";
    case SimilarityMetric::euclidean: return "euclidean";
    case SimilarityMetric::squared_euclidean: return "squared_euclidean";
  }
  return "?";
}

const char* to_string(Aggregation a) {
  switch (a) {
    case Aggregation::mean: return "mean";
    case Aggregation::max: return "max";
    case Aggregation::centroid: return "centroid";
  }
  return "?";
}

namespace {

double pair_score(const Eigen::VectorXd& cand, double cand_norm,
                  const Eigen::VectorXd& member, double member_norm,
                  SimilarityMetric metric) {
  switch (metric) {
    case SimilarityMetric::cosine: {
      if (cand_norm == 0.0 || member_norm == 0.0) return 0.0;
      return cand.dot(member) / (cand_norm * member_norm);
    }
    case SimilarityMetric::euclidean:
      return -std::sqrt((cand - member).squaredNorm());
    case SimilarityMetric::squared_euclidean:
      return -(cand - member).squaredNorm();
  }
  return 0.0;
}

}  // namespace

std::vector<double> score_candidates(const FeatureMatrix& features,
                                     const std::set<std::string>& included,
                                     SimilarityMetric metric,
                                     Aggregation aggregation, Exec exec) {
  if (included.empty())
    throw std::runtime_error("cannot score candidates against an empty included set");

  std::vector<std::size_t> member_rows;
  {
    // row lookup; features.row_ids is small enough to scan once
    std::map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < features.rows(); i++) row_of[features.row_ids[i]] = i;
    for (const auto& id : included) {
      auto it = row_of.find(id);
      if (it == row_of.end())
        throw std::runtime_error("included trial id not in feature matrix: " + id);
      member_rows.push_back(it->second);
    }
  }

  std::vector<Eigen::VectorXd> members;
  std::vector<double> member_norms;
  for (auto r : member_rows) {
    members.push_back(features.row(r));
    member_norms.push_back(members.back().norm());
  }
  Eigen::VectorXd centroid = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(features.cols));
  for (const auto& m : members) centroid += m;
  centroid /= static_cast<double>(members.size());
  const double centroid_norm = centroid.norm();

  std::vector<double> scores(features.rows(), 0.0);
  auto score_row = [&](std::size_t r) {
    Eigen::VectorXd cand = features.row(r);
    double cand_norm = cand.norm();
    if (aggregation == Aggregation::centroid) {
      scores[r] = pair_score(cand, cand_norm, centroid, centroid_norm, metric);
      return;
    }
    double acc = aggregation == Aggregation::max
                     ? -std::numeric_limits<double>::infinity()
                     : 0.0;
    for (std::size_t m = 0; m < members.size(); m++) {
      double s = pair_score(cand, cand_norm, members[m], member_norms[m], metric);
      if (aggregation == Aggregation::max)
        acc = std::max(acc, s);
      else
        acc += s;
    }
    scores[r] = aggregation == Aggregation::mean
                    ? acc / static_cast<double>(members.size())
                    : acc;
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t r = 0; r < static_cast<std::int64_t>(features.rows()); r++)
      score_row(static_cast<std::size_t>(r));
  } else {
    for (std::size_t r = 0; r < features.rows(); r++) score_row(r);
  }
  return scores;
}

RankedList rank(const std::vector<double>& scores,
                const std::vector<std::string>& ids,
                const std::set<std::string>& excluded,
                const std::string& review_id) {
  if (scores.size() != ids.size())
    throw std::runtime_error("score/id count mismatch in rank");
  RankedList list;
  list.review_id = review_id;
  list.excluded_ids.assign(excluded.begin(), excluded.end());
  list.entries.reserve(ids.size());
  for (std::size_t i = 0; i < ids.size(); i++) {
    if (excluded.count(ids[i])) continue;
    list.entries.push_back(RankedEntry{ids[i], scores[i], 0});
  }
  std::sort(list.entries.begin(), list.entries.end(),
            [](const RankedEntry& a, const RankedEntry& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.trial_id < b.trial_id;
            });
  for (std::size_t i = 0; i < list.entries.size(); i++) list.entries[i].rank = i + 1;
  return list;
}

void save_ranked_list(const RankedList& list, const std::filesystem::path& path,
                      const std::string& metadata) {
  std::ostringstream os;
  os << "# trialrank ranked list v1\n";
  os << "# review " << list.review_id << "\n";
  if (!metadata.empty()) os << "# " << metadata << "\n";
  os << "# excluded";
  for (const auto& id : list.excluded_ids) os << ' ' << id;
  os << "\nrank,trial_id,score\n";
  char buf[64];
  for (const auto& e : list.entries) {
    std::snprintf(buf, sizeof(buf), "%.17g", e.score);
    os << e.rank << ',' << e.trial_id << ',' << buf << '\n';
  }
  atomic_write_text(path, os.str());
}

RankedList load_ranked_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ranked list: " + path.string());
  RankedList list;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# review ", 0) == 0) list.review_id = line.substr(9);
      if (line.rfind("# excluded", 0) == 0) {
        std::istringstream ss(line.substr(10));
        std::string id;
        while (ss >> id) list.excluded_ids.push_back(id);
      }
      continue;
    }
    if (line.rfind("rank,", 0) == 0) continue;
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("malformed ranked list line '" + line + "' in " + path.string());
    RankedEntry e;
    e.rank = std::stoull(line.substr(0, c1));
    e.trial_id = line.substr(c1 + 1, c2 - c1 - 1);
    e.score = std::stod(line.substr(c2 + 1));
    list.entries.push_back(std::move(e));
  }
  return list;
}

}  // namespace trialrank

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trialrank/matfac.hpp"
#include "trialrank/record.hpp"

namespace trialrank {

struct ReviewSplit {
  std::string review_id;
  std::vector<std::string> train_ids;  // oldest completion dates first
  std::vector<std::string> test_ids;
};

struct SplitSpec {
  std::vector<ReviewSplit> reviews;  // review_id order
  std::string ordering_basis = "completion_date";
  std::size_t min_train = 3;
  std::uint64_t corpus_hash = 0;
  // reviews dropped for having too few links, with reasons
  std::vector<std::string> warnings;

  std::uint64_t content_hash() const;
};

// Date-ordered split: the oldest min_train trials of each review train,
// the rest test. Undated trials sort last, ties break by trial id.
// Reviews with <= min_train links are excluded with a warning.
SplitSpec make_split(const std::vector<ReviewLinkSet>& links, const Corpus& corpus,
                     std::size_t min_train = 3);

// Builds the trials x reviews link matrix for a split, rows in corpus
// order, one train/test-masked link per (trial, review) pair.
LinkMatrix build_link_matrix(const SplitSpec& split, const Corpus& corpus);

void save_split(const SplitSpec& s, const std::filesystem::path& path);
SplitSpec load_split(const std::filesystem::path& path);

}  // namespace trialrank

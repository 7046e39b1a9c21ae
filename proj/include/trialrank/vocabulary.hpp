#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "trialrank/record.hpp"
#include "trialrank/text.hpp"

namespace trialrank {

struct Vocabulary {
  std::vector<std::string> terms;        // unique, sorted
  std::vector<std::uint64_t> document_frequency;  // parallel to terms
  std::uint64_t min_df = 5;
  std::uint64_t n_documents = 0;  // corpus size at build time, fixes idf
  std::string stopword_version;

  std::unordered_map<std::string, std::uint32_t> index;

  void rebuild_index();
  std::size_t size() const { return terms.size(); }
  std::uint64_t content_hash() const;
};

// Document frequency over stemmed, stop-filtered tokens; terms below
// min_df are dropped. Default min_df = 5.
Vocabulary build_vocabulary(const Corpus& corpus, std::uint64_t min_df = 5,
                            const TokenizerOptions& opts = {});

// Term-per-line text format: "term<TAB>df", preceded by '#' metadata lines.
void save_vocabulary(const Vocabulary& v, const std::filesystem::path& path);
Vocabulary load_vocabulary(const std::filesystem::path& path);

}  // namespace trialrank

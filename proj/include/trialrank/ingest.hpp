#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "trialrank/record.hpp"

namespace trialrank {

struct IngestOptions {
  bool strip_markup = true;
  // Empty = no filter; otherwise keep only records whose status matches
  // case-insensitively (e.g. "completed").
  std::string status_filter;
};

// Parses one record document. Dispatches on content: a leading '<' means
// the public registry XML export schema, otherwise the flat JSON format.
RegistryRecord parse_record(const std::string& content,
                            const std::string& source_name,
                            const IngestOptions& opts = {});

// Reads every *.json / *.xml file under `dir` (records may be parsed in
// parallel); result is sorted by id and immutable from then on.
Corpus load_corpus(const std::filesystem::path& dir,
                   const IngestOptions& opts = {});

// Single-file snapshot with a manifest (format version, snapshot date,
// record count). Round-trips byte-exactly.
void save_snapshot(const Corpus& corpus, const std::filesystem::path& path);
Corpus load_snapshot(const std::filesystem::path& path);

struct LinkLoadResult {
  std::vector<ReviewLinkSet> reviews;  // sorted by review_id
  std::size_t duplicate_pairs_dropped = 0;
};

// Delimited text, one (review_id, trial_id) pair per line, header row
// required. Unresolved trial ids are an error, not a silent drop.
LinkLoadResult load_links(const std::filesystem::path& path,
                          const Corpus& corpus);

}  // namespace trialrank

#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace trialrank {

// One trial registration, reduced to the text fields used downstream.
struct RegistryRecord {
  std::string id;
  std::string brief_title;
  std::string official_title;
  std::string detailed_description;
  std::string inclusion_criteria;
  std::vector<std::string> intervention_names;
  // Normalized "YYYY", "YYYY-MM" or "YYYY-MM-DD"; empty when absent.
  // Zero-padded so lexicographic order is chronological order.
  std::optional<std::string> completion_date;
  std::string status;

  bool has_text() const;
  // Fields joined with single spaces in fixed order; the document fed to
  // the tokenizer.
  std::string concatenated_text() const;
};

struct Corpus {
  std::vector<RegistryRecord> records;  // sorted by id
  std::string snapshot_date;
  std::string source_note;
  bool markup_stripped = true;

  std::map<std::string, std::size_t> index;  // id -> row

  void rebuild_index();
  const RegistryRecord* find(const std::string& id) const;
  std::size_t row_of(const std::string& id) const;  // throws if absent
  // Fingerprint over ids and field bytes; identifies the corpus in
  // downstream artifact headers.
  std::uint64_t content_hash() const;
};

struct ReviewLinkSet {
  std::string review_id;
  std::vector<std::string> included_trial_ids;  // unique, corpus-resolved
};

}  // namespace trialrank

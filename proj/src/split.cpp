#include "trialrank/split.hpp"

#include <algorithm>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"

using json = nlohmann::json;

namespace trialrank {

std::uint64_t SplitSpec::content_hash() const {
  Fnv1a h;
  h.update(ordering_basis);
  h.update_pod(min_train);
  h.update_pod(corpus_hash);
  for (const auto& r : reviews) {
    h.update(r.review_id);
    for (const auto& id : r.train_ids) h.update(id);
    h.update("|");
    for (const auto& id : r.test_ids) h.update(id);
  }
  return h.digest();
}

SplitSpec make_split(const std::vector<ReviewLinkSet>& links, const Corpus& corpus,
                     std::size_t min_train) {
  SplitSpec spec;
  spec.min_train = min_train;
  spec.corpus_hash = corpus.content_hash();
  for (const auto& review : links) {
    if (review.included_trial_ids.size() <= min_train) {
      spec.warnings.push_back("review " + review.review_id + " excluded: only " +
                              std::to_string(review.included_trial_ids.size()) +
                              " links, need more than " + std::to_string(min_train));
      continue;
    }
    std::vector<std::string> ordered = review.included_trial_ids;
    // undated trials sort after every dated one
    std::sort(ordered.begin(), ordered.end(),
              [&](const std::string& a, const std::string& b) {
                const auto* ra = corpus.find(a);
                const auto* rb = corpus.find(b);
                if (!ra || !rb)
                  throw std::runtime_error("split references unknown trial id");
                const std::string da = ra->completion_date.value_or("\x7f");
                const std::string db = rb->completion_date.value_or("\x7f");
                if (da != db) return da < db;
                return a < b;
              });
    ReviewSplit rs;
    rs.review_id = review.review_id;
    rs.train_ids.assign(ordered.begin(),
                        ordered.begin() + static_cast<std::ptrdiff_t>(min_train));
    rs.test_ids.assign(ordered.begin() + static_cast<std::ptrdiff_t>(min_train),
                       ordered.end());
    spec.reviews.push_back(std::move(rs));
  }
  std::sort(spec.reviews.begin(), spec.reviews.end(),
            [](const ReviewSplit& a, const ReviewSplit& b) {
              return a.review_id < b.review_id;
            });
  return spec;
}

LinkMatrix build_link_matrix(const SplitSpec& split, const Corpus& corpus) {
  LinkMatrix t;
  for (const auto& rec : corpus.records) t.trial_ids.push_back(rec.id);
  for (const auto& r : split.reviews) t.review_ids.push_back(r.review_id);
  for (std::size_t v = 0; v < split.reviews.size(); v++) {
    const auto& r = split.reviews[v];
    for (const auto& id : r.train_ids)
      t.links.push_back({static_cast<std::uint32_t>(corpus.row_of(id)),
                         static_cast<std::uint32_t>(v), LinkMask::train});
    for (const auto& id : r.test_ids)
      t.links.push_back({static_cast<std::uint32_t>(corpus.row_of(id)),
                         static_cast<std::uint32_t>(v), LinkMask::test});
  }
  return t;
}

void save_split(const SplitSpec& s, const std::filesystem::path& path) {
  json reviews = json::array();
  for (const auto& r : s.reviews)
    reviews.push_back({{"review_id", r.review_id},
                       {"train", r.train_ids},
                       {"test", r.test_ids}});
  json doc{{"format_version", 1},
           {"ordering_basis", s.ordering_basis},
           {"min_train", s.min_train},
           {"corpus_hash", hash_hex(s.corpus_hash)},
           {"warnings", s.warnings},
           {"reviews", std::move(reviews)}};
  atomic_write_text(path, doc.dump(2) + "\n");
}

SplitSpec load_split(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed split file " + path.string() + ": " + e.what());
  }
  if (doc.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported split format version in " + path.string());
  SplitSpec s;
  s.ordering_basis = doc.value("ordering_basis", "completion_date");
  s.min_train = doc.at("min_train").get<std::size_t>();
  s.corpus_hash = std::stoull(doc.at("corpus_hash").get<std::string>(), nullptr, 16);
  if (doc.contains("warnings"))
    s.warnings = doc["warnings"].get<std::vector<std::string>>();
  for (const auto& r : doc.at("reviews")) {
    ReviewSplit rs;
    rs.review_id = r.at("review_id").get<std::string>();
    rs.train_ids = r.at("train").get<std::vector<std::string>>();
    rs.test_ids = r.at("test").get<std::vector<std::string>>();
    s.reviews.push_back(std::move(rs));
  }
  return s;
}

}  // namespace trialrank

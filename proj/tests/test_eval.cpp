#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>

#include "trialrank/container.hpp"
#include "trialrank/metrics.hpp"
#include "trialrank/split.hpp"

using namespace trialrank;
namespace fs = std::filesystem;

namespace {

// Three reviews with hand-placed ranks over 100 candidates each.
std::vector<LinkRank> handmade_ranks() {
  return {
      {"A", "T1", 1}, {"A", "T2", 5},  {"B", "T3", 10},
      {"C", "T4", 3}, {"C", "T5", 50}, {"C", "T6", 80},
  };
}

Corpus dated_corpus(const std::vector<std::pair<std::string, std::string>>& entries) {
  Corpus corpus;
  for (const auto& [id, date] : entries) {
    RegistryRecord r;
    r.id = id;
    r.brief_title = "trial " + id;
    if (!date.empty()) r.completion_date = date;
    corpus.records.push_back(r);
  }
  std::sort(corpus.records.begin(), corpus.records.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  corpus.rebuild_index();
  return corpus;
}

}  // namespace

TEST_CASE("median rank") {
  CHECK(median_rank({59}) == 59.0);
  CHECK(median_rank({1, 2, 3, 4}) == 2.5);
  CHECK(median_rank({4, 1, 3, 2}) == 2.5);  // order-insensitive
  CHECK(median_rank({7, 3, 9}) == 7.0);
  CHECK_THROWS_AS(median_rank({}), std::runtime_error);
}

TEST_CASE("recall at N") {
  CHECK(recall_at({3, 40, 99, 100, 12}, 100, 5) == 1.0);
  CHECK(recall_at({50, 150, 250}, 100, 3) == doctest::Approx(1.0 / 3));
  CHECK(recall_at({101}, 100, 1) == 0.0);
  CHECK_THROWS_AS(recall_at({1}, 0, 1), std::runtime_error);
}

TEST_CASE("WSS trivial single-review case") {
  std::vector<LinkRank> one = {{"A", "T1", 1}};
  CHECK(wss_at_recall(one, 0.95, 100) == doctest::Approx(0.99).epsilon(1e-14));
}

// Hand computation for the three-review instance: 6 test links, level
// 0.95 needs all 6, so the shared depth is the largest rank (80).
TEST_CASE("WSS global depth matches the spreadsheet numbers") {
  auto ranks = handmade_ranks();
  CHECK(wss_at_recall(ranks, 0.95, 100) ==
        doctest::Approx(1.0 - 3 * 80.0 / 300).epsilon(1e-14));
  // level 0.8 needs 5 of 6: depth is the 5th smallest rank (50)
  CHECK(wss_at_recall(ranks, 0.80, 100) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("WSS per-review depth variant") {
  // A screens to 5, B to 10, C to 80: 95 of 300 screened
  CHECK(wss_at_recall(handmade_ranks(), 0.95, 100, WssVariant::per_review_depth) ==
        doctest::Approx(1.0 - 95.0 / 300).epsilon(1e-14));
}

TEST_CASE("WSS Cohen variant subtracts the recall offset") {
  double global = wss_at_recall(handmade_ranks(), 0.95, 100);
  double cohen = wss_at_recall(handmade_ranks(), 0.95, 100, WssVariant::cohen);
  CHECK(cohen == doctest::Approx(global - 0.05).epsilon(1e-14));
}

TEST_CASE("WSS decreases weakly as the recall level rises") {
  auto ranks = handmade_ranks();
  double prev = 2.0;
  for (double level : {0.25, 0.5, 0.75, 0.9, 0.95, 1.0}) {
    double w = wss_at_recall(ranks, level, 100);
    CHECK(w <= prev + 1e-12);
    prev = w;
  }
  CHECK_THROWS_AS(wss_at_recall(ranks, 0.0, 100), std::runtime_error);
  CHECK_THROWS_AS(wss_at_recall(ranks, 1.5, 100), std::runtime_error);
}

TEST_CASE("recall grid is clipped and the curve is monotone to 1") {
  auto grid = recall_grid(150);
  REQUIRE(!grid.empty());
  CHECK(grid.front() == 1);
  CHECK(grid.back() == 150);
  for (std::size_t i = 1; i < grid.size(); i++) CHECK(grid[i] > grid[i - 1]);

  auto report = evaluate(handmade_ranks(), 100, "handmade");
  double prev = -1;
  for (const auto& [n, r] : report.recall_at) {
    CHECK(r >= prev);
    prev = r;
  }
  CHECK(report.recall_at.rbegin()->second == 1.0);
  CHECK(report.median_rank == 7.5);  // central pair (5, 10)
}

TEST_CASE("report files: shape, headers and byte-identical reruns") {
  auto report = evaluate(handmade_ranks(), 100, "handmade");
  auto dir = fs::temp_directory_path() / "trialrank_eval";
  fs::remove_all(dir);
  emit_report(report, dir);
  auto ranks_csv = read_text(dir / "ranks.csv");
  CHECK(ranks_csv.rfind("review_id,trial_id,rank\n", 0) == 0);
  CHECK(ranks_csv.find("C,T6,80") != std::string::npos);
  auto summary = read_text(dir / "summary.csv");
  CHECK(summary.find("method,wss95,median_rank,recall_at_100") != std::string::npos);
  CHECK(summary.find("handmade,") != std::string::npos);

  emit_report(report, dir);  // rerun must not change a byte
  CHECK(read_text(dir / "summary.csv") == summary);
  CHECK(read_text(dir / "ranks.csv") == ranks_csv);

  // side-by-side summary: one row per method after the header block
  auto b = report;
  b.method_label = "other";
  auto c = report;
  c.method_label = "third";
  emit_summary({report, b, c}, dir / "three.csv");
  auto three = read_text(dir / "three.csv");
  CHECK(three.find("handmade,") != std::string::npos);
  CHECK(three.find("other,") != std::string::npos);
  CHECK(three.find("third,") != std::string::npos);
}

TEST_CASE("split boundary: 4 dated trials, min_train 3") {
  auto corpus = dated_corpus({{"T1", "2003"}, {"T2", "2001"}, {"T3", "2004"}, {"T4", "2002"}});
  ReviewLinkSet review;
  review.review_id = "CD1";
  review.included_trial_ids = {"T1", "T2", "T3", "T4"};
  auto split = make_split({review}, corpus, 3);
  REQUIRE(split.reviews.size() == 1);
  CHECK(split.reviews[0].train_ids == std::vector<std::string>{"T2", "T4", "T1"});
  CHECK(split.reviews[0].test_ids == std::vector<std::string>{"T3"});
  CHECK(split.warnings.empty());
}

TEST_CASE("split excludes too-small reviews with a warning") {
  auto corpus = dated_corpus({{"T1", "2001"}, {"T2", "2002"}, {"T3", "2003"}});
  ReviewLinkSet small;
  small.review_id = "CD9";
  small.included_trial_ids = {"T1", "T2", "T3"};
  auto split = make_split({small}, corpus, 3);
  CHECK(split.reviews.empty());
  REQUIRE(split.warnings.size() == 1);
  CHECK(split.warnings[0].find("CD9") != std::string::npos);
}

TEST_CASE("split ordering: shuffled input, undated trials last, ties by id") {
  auto corpus = dated_corpus({
      {"T01", "2005-03"}, {"T02", "2001"}, {"T03", ""}, {"T04", "2003-07-01"},
      {"T05", "2003-07-01"}, {"T06", "2002-12"}, {"T07", ""}, {"T08", "2004"},
      {"T09", "2000-01-01"}, {"T10", "2006"},
  });
  ReviewLinkSet review;
  review.review_id = "CD2";
  review.included_trial_ids = {"T05", "T10", "T01", "T07", "T03",
                               "T08", "T02", "T09", "T06", "T04"};
  auto split = make_split({review}, corpus, 3);
  REQUIRE(split.reviews.size() == 1);
  // hand ordering: T09 2000, T02 2001, T06 2002-12, then the 2003-07-01
  // tie by id (T04, T05), T08, T01, T10, undated T03 and T07 last
  CHECK(split.reviews[0].train_ids == std::vector<std::string>{"T09", "T02", "T06"});
  CHECK(split.reviews[0].test_ids ==
        std::vector<std::string>{"T04", "T05", "T08", "T01", "T10", "T03", "T07"});
}

TEST_CASE("split serialization is deterministic and round-trips") {
  auto corpus = dated_corpus({{"T1", "2003"}, {"T2", "2001"}, {"T3", "2004"}, {"T4", "2002"}});
  ReviewLinkSet review;
  review.review_id = "CD1";
  review.included_trial_ids = {"T1", "T2", "T3", "T4"};
  auto split = make_split({review}, corpus, 3);
  auto dir = fs::temp_directory_path() / "trialrank_split";
  fs::create_directories(dir);
  save_split(split, dir / "a.json");
  save_split(split, dir / "b.json");
  CHECK(read_text(dir / "a.json") == read_text(dir / "b.json"));
  auto back = load_split(dir / "a.json");
  CHECK(back.content_hash() == split.content_hash());
  CHECK(back.min_train == 3);
  CHECK(back.corpus_hash == split.corpus_hash);
}

TEST_CASE("link matrix carries the split masks in corpus order") {
  auto corpus = dated_corpus({{"T1", "2003"}, {"T2", "2001"}, {"T3", "2004"}, {"T4", "2002"}});
  ReviewLinkSet review;
  review.review_id = "CD1";
  review.included_trial_ids = {"T1", "T2", "T3", "T4"};
  auto split = make_split({review}, corpus, 3);
  auto lm = build_link_matrix(split, corpus);
  CHECK(lm.trial_ids == std::vector<std::string>{"T1", "T2", "T3", "T4"});
  CHECK(lm.review_ids == std::vector<std::string>{"CD1"});
  REQUIRE(lm.links.size() == 4);
  std::size_t train = 0, test = 0;
  for (const auto& l : lm.links) {
    if (l.mask == LinkMask::train) train++;
    if (l.mask == LinkMask::test) test++;
    if (lm.trial_ids[l.u] == "T3") CHECK(l.mask == LinkMask::test);
  }
  CHECK(train == 3);
  CHECK(test == 1);
}

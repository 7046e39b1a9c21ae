#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "trialrank/stopwords.hpp"
#include "trialrank/text.hpp"

using namespace trialrank;

TEST_CASE("lowercase, stop-filter, stem") {
  auto toks = tokenize("Metformin improves glycemic control");
  REQUIRE(toks.size() == 4);
  CHECK(toks[0] == "metformin");
  CHECK(toks[1] == "improv");
  CHECK(toks[2] == "glycem");
  CHECK(toks[3] == "control");
}

TEST_CASE("stop-word-only input") {
  CHECK(tokenize("the of and").empty());
}

TEST_CASE("empty input") {
  CHECK(tokenize("").empty());
}

TEST_CASE("punctuation splits, digits and single chars dropped") {
  auto toks = tokenize("HbA1c < 7.5% (n=120), type-2 diabetes!");
  // "hba1c" survives (alphanumeric, not pure-digit); "7", "5", "n", "120",
  // "2" are dropped; "type" and "diabetes" stem through
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == "hba1c");
  CHECK(toks[1] == "type");
  CHECK(toks[2] == "diabet");
}

TEST_CASE("order preserved") {
  auto toks = tokenize("placebo metformin placebo");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0] == "placebo");
  CHECK(toks[1] == "metformin");
  CHECK(toks[2] == "placebo");
}

TEST_CASE("stop list is the fixed 318-word version") {
  CHECK(english_stopwords().size() == 318);
  CHECK(english_stopwords().count("the") == 1);
  CHECK(english_stopwords().count("whereupon") == 1);
  CHECK(english_stopwords().count("metformin") == 0);
  CHECK(std::string(stopword_list_version()) == "en-318-v1");
}

TEST_CASE("html stripping") {
  CHECK(strip_html("<p>Metformin &amp; placebo</p>") == " Metformin & placebo ");
  CHECK(strip_html("no tags") == "no tags");
  CHECK(strip_html("a<br/>b") == "a b");
}

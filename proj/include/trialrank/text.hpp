#pragma once

#include <string>
#include <vector>

namespace trialrank {

struct TokenizerOptions {
  bool drop_stopwords = true;
  bool stem = true;
  // tokens that are pure digits or a single character are dropped
  bool drop_short_and_numeric = true;
};

// Lowercase, split on non-alphanumeric, filter, stem. Order-preserving.
std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizerOptions& opts = {});

// Remove <...> tags and decode the handful of entities that occur in
// registry exports (&amp; &lt; &gt; &quot; &apos; &#39; &nbsp;).
std::string strip_html(const std::string& text);

}  // namespace trialrank

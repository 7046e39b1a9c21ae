#include "trialrank/text.hpp"

#include <cctype>

#include "trialrank/stemmer.hpp"
#include "trialrank/stopwords.hpp"

namespace trialrank {

std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizerOptions& opts) {
  std::vector<std::string> out;
  const auto& stop = english_stopwords();
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    std::string tok;
    tok.swap(cur);
    if (opts.drop_short_and_numeric) {
      if (tok.size() < 2) return;
      bool all_digits = true;
      for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c))) { all_digits = false; break; }
      if (all_digits) return;
    }
    if (opts.drop_stopwords && stop.count(tok)) return;
    if (opts.stem) tok = porter_stem(tok);
    out.push_back(std::move(tok));
  };
  for (char ch : text) {
    unsigned char c = static_cast<unsigned char>(ch);
    if (std::isalnum(c))
      cur.push_back(static_cast<char>(std::tolower(c)));
    else
      flush();
  }
  flush();
  return out;
}

std::string strip_html(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  bool in_tag = false;
  for (size_t i = 0; i < text.size(); i++) {
    char c = text[i];
    if (in_tag) {
      if (c == '>') in_tag = false;
      continue;
    }
    if (c == '<') {
      in_tag = true;
      // tags act as token boundaries
      out.push_back(' ');
      continue;
    }
    if (c == '&') {
      static const std::pair<const char*, char> kEntities[] = {
          {"&amp;", '&'},  {"&lt;", '<'},   {"&gt;", '>'},  {"&quot;", '"'},
          {"&apos;", '\''}, {"&#39;", '\''}, {"&nbsp;", ' '},
      };
      bool matched = false;
      for (const auto& [ent, repl] : kEntities) {
        size_t len = std::char_traits<char>::length(ent);
        if (text.compare(i, len, ent) == 0) {
          out.push_back(repl);
          i += len - 1;
          matched = true;
          break;
        }
      }
      if (!matched) out.push_back(c);
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace trialrank

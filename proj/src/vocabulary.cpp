#include "trialrank/vocabulary.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"
#include "trialrank/stopwords.hpp"

namespace trialrank {

void Vocabulary::rebuild_index() {
  index.clear();
  index.reserve(terms.size());
  for (std::size_t i = 0; i < terms.size(); i++)
    index[terms[i]] = static_cast<std::uint32_t>(i);
}

std::uint64_t Vocabulary::content_hash() const {
  Fnv1a h;
  for (std::size_t i = 0; i < terms.size(); i++) {
    h.update(terms[i]);
    h.update_pod(document_frequency[i]);
  }
  h.update_pod(min_df);
  h.update_pod(n_documents);
  h.update(stopword_version);
  return h.digest();
}

Vocabulary build_vocabulary(const Corpus& corpus, std::uint64_t min_df,
                            const TokenizerOptions& opts) {
  if (corpus.records.empty())
    throw std::runtime_error("cannot build a vocabulary from an empty corpus");
  std::map<std::string, std::uint64_t> df;
  for (const auto& rec : corpus.records) {
    std::set<std::string> seen;
    for (auto& tok : tokenize(rec.concatenated_text(), opts))
      seen.insert(std::move(tok));
    for (const auto& t : seen) df[t]++;
  }
  Vocabulary v;
  v.min_df = min_df;
  v.n_documents = corpus.records.size();
  v.stopword_version = stopword_list_version();
  for (const auto& [term, count] : df) {
    if (count < min_df) continue;
    v.terms.push_back(term);
    v.document_frequency.push_back(count);
  }
  v.rebuild_index();
  return v;
}

void save_vocabulary(const Vocabulary& v, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "# trialrank vocabulary v1\n";
  os << "# min_df " << v.min_df << "\n";
  os << "# n_documents " << v.n_documents << "\n";
  os << "# stopwords " << v.stopword_version << "\n";
  for (std::size_t i = 0; i < v.terms.size(); i++)
    os << v.terms[i] << '\t' << v.document_frequency[i] << '\n';
  atomic_write_text(path, os.str());
}

Vocabulary load_vocabulary(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  Vocabulary v;
  bool saw_magic = false;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line.rfind("# trialrank vocabulary", 0) == 0) saw_magic = true;
      unsigned long long n = 0;
      char tag[64] = {0};
      if (std::sscanf(line.c_str(), "# %63s %llu", tag, &n) == 2) {
        std::string t(tag);
        if (t == "min_df") v.min_df = n;
        else if (t == "n_documents") v.n_documents = n;
      }
      char buf[128] = {0};
      if (std::sscanf(line.c_str(), "# stopwords %127s", buf) == 1)
        v.stopword_version = buf;
      continue;
    }
    auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw std::runtime_error("malformed vocabulary line '" + line + "' in " +
                               path.string());
    v.terms.push_back(line.substr(0, tab));
    v.document_frequency.push_back(std::stoull(line.substr(tab + 1)));
  }
  if (!saw_magic)
    throw std::runtime_error("not a vocabulary file: " + path.string());
  if (!std::is_sorted(v.terms.begin(), v.terms.end()))
    throw std::runtime_error("vocabulary terms out of order in " + path.string());
  v.rebuild_index();
  return v;
}

}  // namespace trialrank

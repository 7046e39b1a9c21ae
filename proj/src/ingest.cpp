#include "trialrank/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"
#include "trialrank/text.hpp"

using json = nlohmann::json;

namespace trialrank {

bool RegistryRecord::has_text() const {
  return !brief_title.empty() || !official_title.empty() ||
         !detailed_description.empty() || !inclusion_criteria.empty() ||
         !intervention_names.empty();
}

std::string RegistryRecord::concatenated_text() const {
  std::string out;
  auto add = [&](const std::string& s) {
    if (s.empty()) return;
    if (!out.empty()) out.push_back(' ');
    out += s;
  };
  add(brief_title);
  add(official_title);
  add(detailed_description);
  add(inclusion_criteria);
  for (const auto& name : intervention_names) add(name);
  return out;
}

void Corpus::rebuild_index() {
  index.clear();
  for (std::size_t i = 0; i < records.size(); i++) index[records[i].id] = i;
}

const RegistryRecord* Corpus::find(const std::string& id) const {
  auto it = index.find(id);
  return it == index.end() ? nullptr : &records[it->second];
}

std::size_t Corpus::row_of(const std::string& id) const {
  auto it = index.find(id);
  if (it == index.end())
    throw std::runtime_error("trial id not in corpus: " + id);
  return it->second;
}

std::uint64_t Corpus::content_hash() const {
  Fnv1a h;
  for (const auto& r : records) {
    h.update(r.id);
    h.update(r.brief_title);
    h.update(r.official_title);
    h.update(r.detailed_description);
    h.update(r.inclusion_criteria);
    for (const auto& n : r.intervention_names) h.update(n);
    h.update(r.completion_date.value_or(""));
    h.update(r.status);
  }
  return h.digest();
}

namespace {

std::string normalize_date(const std::string& raw, const std::string& source) {
  // Accepts "YYYY", "YYYY-MM", "YYYY-MM-DD", and the registry export's
  // "Month DD, YYYY" / "Month YYYY" forms.
  static const char* kMonths[] = {"january", "february", "march",     "april",
                                  "may",     "june",     "july",      "august",
                                  "september", "october", "november", "december"};
  std::string s = raw;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
  if (s.empty()) return "";
  if (std::isdigit(static_cast<unsigned char>(s[0]))) {
    int y = 0, m = 0, d = 0;
    int n = std::sscanf(s.c_str(), "%d-%d-%d", &y, &m, &d);
    if (n < 1 || y < 1000)
      throw std::runtime_error("unparseable completion_date '" + raw + "' in " + source);
    char buf[16];
    if (n == 1) std::snprintf(buf, sizeof(buf), "%04d", y);
    else if (n == 2) std::snprintf(buf, sizeof(buf), "%04d-%02d", y, m);
    else std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
  }
  std::string lower;
  for (char c : s) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  for (int mi = 0; mi < 12; mi++) {
    const std::string name = kMonths[mi];
    if (lower.rfind(name, 0) != 0) continue;
    std::string rest = s.substr(name.size());
    int d = 0, y = 0;
    char buf[16];
    if (std::sscanf(rest.c_str(), " %d , %d", &d, &y) == 2 ||
        std::sscanf(rest.c_str(), " %d, %d", &d, &y) == 2) {
      std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, mi + 1, d);
      return buf;
    }
    if (std::sscanf(rest.c_str(), " %d", &y) == 1 && y >= 1000) {
      std::snprintf(buf, sizeof(buf), "%04d-%02d", y, mi + 1);
      return buf;
    }
  }
  throw std::runtime_error("unparseable completion_date '" + raw + "' in " + source);
}

std::string clean(std::string s, const IngestOptions& opts) {
  if (opts.strip_markup) s = strip_html(s);
  return s;
}

RegistryRecord parse_record_json(const std::string& content,
                                 const std::string& source,
                                 const IngestOptions& opts) {
  json doc;
  try {
    doc = json::parse(content);
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed record " + source + ": " + e.what());
  }
  if (!doc.is_object())
    throw std::runtime_error("malformed record " + source + ": not an object");
  if (!doc.contains("id") || !doc["id"].is_string() ||
      doc["id"].get<std::string>().empty())
    throw std::runtime_error("missing id in " + source);

  auto text_field = [&](const char* name) -> std::string {
    if (!doc.contains(name)) return "";
    if (!doc[name].is_string())
      throw std::runtime_error("malformed record " + source + ": field '" +
                               name + "' is not a string");
    return clean(doc[name].get<std::string>(), opts);
  };

  RegistryRecord rec;
  rec.id = doc["id"].get<std::string>();
  rec.brief_title = text_field("brief_title");
  rec.official_title = text_field("official_title");
  rec.detailed_description = text_field("detailed_description");
  rec.inclusion_criteria = text_field("inclusion_criteria");
  if (doc.contains("intervention_names")) {
    if (!doc["intervention_names"].is_array())
      throw std::runtime_error("malformed record " + source +
                               ": field 'intervention_names' is not an array");
    for (const auto& v : doc["intervention_names"]) {
      if (!v.is_string())
        throw std::runtime_error("malformed record " + source +
                                 ": intervention name is not a string");
      rec.intervention_names.push_back(clean(v.get<std::string>(), opts));
    }
  }
  if (doc.contains("completion_date") && !doc["completion_date"].is_null()) {
    std::string d = normalize_date(doc["completion_date"].get<std::string>(), source);
    if (!d.empty()) rec.completion_date = d;
  }
  if (doc.contains("status")) rec.status = doc["status"].get<std::string>();
  return rec;
}

// Minimal extraction from the public registry XML export. Only the tags
// this pipeline consumes are recognized; everything else is skipped.
std::string xml_first(const std::string& xml, const std::string& tag,
                      std::size_t from = 0) {
  std::string open = "<" + tag + ">";
  std::string close = "</" + tag + ">";
  auto a = xml.find(open, from);
  if (a == std::string::npos) return "";
  a += open.size();
  auto b = xml.find(close, a);
  if (b == std::string::npos) return "";
  return xml.substr(a, b - a);
}

std::string xml_trim(std::string s) {
  auto issp = [](char c) { return std::isspace(static_cast<unsigned char>(c)); };
  while (!s.empty() && issp(s.back())) s.pop_back();
  std::size_t i = 0;
  while (i < s.size() && issp(s[i])) i++;
  return s.substr(i);
}

RegistryRecord parse_record_xml(const std::string& content,
                                const std::string& source,
                                const IngestOptions& opts) {
  RegistryRecord rec;
  rec.id = xml_trim(xml_first(xml_first(content, "id_info"), "nct_id"));
  if (rec.id.empty()) rec.id = xml_trim(xml_first(content, "nct_id"));
  if (rec.id.empty()) throw std::runtime_error("missing id in " + source);
  rec.brief_title = clean(xml_trim(xml_first(content, "brief_title")), opts);
  rec.official_title = clean(xml_trim(xml_first(content, "official_title")), opts);
  rec.detailed_description =
      clean(xml_trim(xml_first(xml_first(content, "detailed_description"), "textblock")), opts);
  rec.inclusion_criteria = clean(
      xml_trim(xml_first(xml_first(xml_first(content, "eligibility"), "criteria"), "textblock")),
      opts);
  std::size_t pos = 0;
  while (true) {
    auto a = content.find("<intervention_name>", pos);
    if (a == std::string::npos) break;
    std::string name = xml_first(content, "intervention_name", a);
    if (!name.empty()) rec.intervention_names.push_back(clean(xml_trim(name), opts));
    pos = a + 1;
  }
  std::string date = xml_trim(xml_first(content, "completion_date"));
  if (!date.empty()) rec.completion_date = normalize_date(date, source);
  rec.status = xml_trim(xml_first(content, "overall_status"));
  return rec;
}

bool status_matches(const std::string& status, const std::string& filter) {
  if (filter.empty()) return true;
  if (status.size() != filter.size()) return false;
  for (std::size_t i = 0; i < status.size(); i++)
    if (std::tolower(static_cast<unsigned char>(status[i])) !=
        std::tolower(static_cast<unsigned char>(filter[i])))
      return false;
  return true;
}

}  // namespace

RegistryRecord parse_record(const std::string& content,
                            const std::string& source_name,
                            const IngestOptions& opts) {
  std::size_t i = 0;
  while (i < content.size() && std::isspace(static_cast<unsigned char>(content[i]))) i++;
  RegistryRecord rec = (i < content.size() && content[i] == '<')
                           ? parse_record_xml(content, source_name, opts)
                           : parse_record_json(content, source_name, opts);
  if (!rec.has_text())
    throw std::runtime_error("record " + rec.id + " in " + source_name +
                             " has no text in any field");
  return rec;
}

Corpus load_corpus(const std::filesystem::path& dir, const IngestOptions& opts) {
  if (!std::filesystem::is_directory(dir))
    throw std::runtime_error("corpus path is not a directory: " + dir.string());
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    auto ext = entry.path().extension().string();
    if (ext == ".json" || ext == ".xml") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  std::vector<RegistryRecord> parsed(files.size());
  std::vector<bool> keep(files.size(), false);
  std::exception_ptr first_error;
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t i = 0; i < static_cast<std::int64_t>(files.size()); i++) {
    try {
      auto rec = parse_record(read_text(files[static_cast<std::size_t>(i)]),
                              files[static_cast<std::size_t>(i)].filename().string(), opts);
      if (status_matches(rec.status, opts.status_filter)) {
        parsed[static_cast<std::size_t>(i)] = std::move(rec);
        keep[static_cast<std::size_t>(i)] = true;
      }
    } catch (...) {
#pragma omp critical
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);

  Corpus corpus;
  std::map<std::string, std::string> seen;  // id -> source file
  for (std::size_t i = 0; i < files.size(); i++) {
    if (!keep[i]) continue;
    auto [it, inserted] = seen.emplace(parsed[i].id, files[i].filename().string());
    if (!inserted)
      throw std::runtime_error("duplicate id " + parsed[i].id + " in " +
                               it->second + " and " + files[i].filename().string());
    corpus.records.push_back(std::move(parsed[i]));
  }
  std::sort(corpus.records.begin(), corpus.records.end(),
            [](const RegistryRecord& a, const RegistryRecord& b) { return a.id < b.id; });
  corpus.markup_stripped = opts.strip_markup;
  corpus.rebuild_index();
  return corpus;
}

void save_snapshot(const Corpus& corpus, const std::filesystem::path& path) {
  json records = json::array();
  for (const auto& r : corpus.records) {
    json rec{{"id", r.id},
             {"brief_title", r.brief_title},
             {"official_title", r.official_title},
             {"detailed_description", r.detailed_description},
             {"inclusion_criteria", r.inclusion_criteria},
             {"intervention_names", r.intervention_names},
             {"status", r.status}};
    if (r.completion_date) rec["completion_date"] = *r.completion_date;
    records.push_back(std::move(rec));
  }
  json doc{{"manifest",
            {{"format_version", 1},
             {"snapshot_date", corpus.snapshot_date},
             {"source_note", corpus.source_note},
             {"markup_stripped", corpus.markup_stripped},
             {"record_count", corpus.records.size()}}},
           {"records", std::move(records)}};
  atomic_write_text(path, doc.dump(2) + "\n");
}

Corpus load_snapshot(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed snapshot " + path.string() + ": " + e.what());
  }
  const auto& man = doc.at("manifest");
  if (man.at("format_version").get<int>() != 1)
    throw std::runtime_error("unsupported snapshot format version in " + path.string());
  Corpus corpus;
  corpus.snapshot_date = man.value("snapshot_date", "");
  corpus.source_note = man.value("source_note", "");
  corpus.markup_stripped = man.value("markup_stripped", true);
  for (const auto& rec : doc.at("records")) {
    RegistryRecord r;
    r.id = rec.at("id").get<std::string>();
    r.brief_title = rec.value("brief_title", "");
    r.official_title = rec.value("official_title", "");
    r.detailed_description = rec.value("detailed_description", "");
    r.inclusion_criteria = rec.value("inclusion_criteria", "");
    if (rec.contains("intervention_names"))
      r.intervention_names = rec["intervention_names"].get<std::vector<std::string>>();
    if (rec.contains("completion_date"))
      r.completion_date = rec["completion_date"].get<std::string>();
    r.status = rec.value("status", "");
    corpus.records.push_back(std::move(r));
  }
  if (man.at("record_count").get<std::size_t>() != corpus.records.size())
    throw std::runtime_error("snapshot record count mismatch in " + path.string());
  corpus.rebuild_index();
  return corpus;
}

LinkLoadResult load_links(const std::filesystem::path& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open link file: " + path.string());
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("link file is empty (header row required): " + path.string());

  auto split_pair = [&](const std::string& l) -> std::pair<std::string, std::string> {
    auto comma = l.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("malformed link line '" + l + "' in " + path.string());
    std::string a = l.substr(0, comma);
    std::string b = l.substr(comma + 1);
    if (!b.empty() && b.back() == '\r') b.pop_back();
    return {a, b};
  };
  {
    auto [h1, h2] = split_pair(line);
    if (h1 != "review_id" || h2 != "trial_id")
      throw std::runtime_error("link file header must be 'review_id,trial_id', got '" +
                               line + "' in " + path.string());
  }

  std::map<std::string, std::vector<std::string>> by_review;
  std::set<std::pair<std::string, std::string>> seen;
  LinkLoadResult result;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto [review, trial] = split_pair(line);
    if (review.empty() || trial.empty())
      throw std::runtime_error("malformed link line '" + line + "' in " + path.string());
    if (!corpus.find(trial))
      throw std::runtime_error("review " + review + " links to trial id " + trial +
                               " which is not in the corpus");
    if (!seen.emplace(review, trial).second) {
      result.duplicate_pairs_dropped++;
      continue;
    }
    by_review[review].push_back(trial);
  }
  for (auto& [review_id, trials] : by_review) {
    if (trials.empty())
      throw std::runtime_error("review " + review_id + " has no resolvable links");
    result.reviews.push_back(ReviewLinkSet{review_id, std::move(trials)});
  }
  if (result.reviews.empty())
    throw std::runtime_error("link file contains no links: " + path.string());
  return result;
}

}  // namespace trialrank

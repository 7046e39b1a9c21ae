#include "trialrank/config.hpp"

#include <nlohmann/json.hpp>
#include <sstream>

#include "trialrank/container.hpp"
#include "trialrank/stopwords.hpp"

using json = nlohmann::json;

namespace trialrank {

ReduceMethod reduce_method_from_string(const std::string& s) {
  if (s == "none") return ReduceMethod::none;
  if (s == "pca") return ReduceMethod::pca;
  if (s == "lda") return ReduceMethod::lda;
  throw ValidationError("unknown reduction method: " + s);
}

const char* to_string(ReduceMethod m) {
  switch (m) {
    case ReduceMethod::none: return "none";
    case ReduceMethod::pca: return "pca";
    case ReduceMethod::lda: return "lda";
  }
  return "?";
}

std::string RunConfig::settings_fingerprint() const {
  std::ostringstream os;
  os << "weighting=" << to_string(weighting) << ";min_df=" << min_df
     << ";smooth_idf=" << tfidf.smooth_idf << ";l2=" << tfidf.l2_normalize
     << ";stopwords=" << stopword_list_version()
     << ";reduce=" << to_string(reduce_method) << ";k=" << reduce_k
     << ";min_train=" << min_train << ";seed=" << seed
     << ";status=" << status_filter << ";strip_markup=" << strip_markup;
  return os.str();
}

RunConfig load_config(const std::filesystem::path& path) {
  json doc;
  try {
    doc = json::parse(read_text(path));
  } catch (const std::exception& e) {
    throw ValidationError("cannot read config " + path.string() + ": " + e.what());
  }
  RunConfig cfg;
  try {
    cfg.corpus = doc.at("corpus").get<std::string>();
    cfg.links = doc.value("links", std::string{});
    cfg.out = doc.value("out", std::string{"runs/out"});
    cfg.seed = doc.value("seed", 42ull);
    cfg.status_filter = doc.value("status_filter", std::string{});
    cfg.strip_markup = doc.value("strip_markup", true);

    if (doc.contains("featurize")) {
      const auto& f = doc["featurize"];
      cfg.weighting = weighting_from_string(f.value("weighting", "tfidf"));
      cfg.min_df = f.value("min_df", 5ull);
      cfg.tfidf.smooth_idf = f.value("smooth_idf", true);
      cfg.tfidf.l2_normalize = f.value("l2_normalize", true);
    }
    if (doc.contains("reduce")) {
      const auto& r = doc["reduce"];
      cfg.reduce_method = reduce_method_from_string(r.value("method", "none"));
      cfg.reduce_k = r.value("k", 20ull);
      cfg.lda_alpha = r.value("alpha", 0.0);
      cfg.lda_beta = r.value("beta", 0.01);
      cfg.lda_sweeps = r.value("sweeps", 1000ull);
    }
    if (doc.contains("split")) cfg.min_train = doc["split"].value("min_train", 3ull);
    if (doc.contains("method")) {
      const auto& m = doc["method"];
      std::string name = m.value("name", "simrank");
      if (name == "simrank")
        cfg.method = MethodName::simrank;
      else if (name == "matfac")
        cfg.method = MethodName::matfac;
      else
        throw ValidationError("unknown method name: " + name);
      cfg.metric = metric_from_string(m.value("metric", "cosine"));
      cfg.aggregation = aggregation_from_string(m.value("aggregation", "mean"));
      cfg.matfac_hp.k = m.value("k", 20ull);
      cfg.matfac_hp.lambda = m.value("lambda", 0.001);
      cfg.matfac_hp.lambda_t = m.value("lambda_t", 0.01);
      cfg.matfac_hp.learning_rate = m.value("learning_rate", 0.001);
      cfg.matfac_hp.max_iterations = m.value("max_iterations", 5000ull);
      cfg.matfac_hp.init_scale = m.value("init_scale", 0.01);
      cfg.matfac_hp.rmse_variant =
          rmse_variant_from_string(m.value("rmse_variant", "both"));
    }
    cfg.matfac_hp.seed = cfg.seed;
    cfg.wss_variant = wss_variant_from_string(doc.value("wss_variant", "global_depth"));
    if (doc.contains("sweep")) {
      const auto& s = doc["sweep"];
      if (s.contains("matfac_k"))
        cfg.sweep_matfac_k = s["matfac_k"].get<std::vector<std::size_t>>();
      if (s.contains("simrank_metric"))
        cfg.sweep_simrank_metrics = s["simrank_metric"].get<std::vector<std::string>>();
    }
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception& e) {
    throw ValidationError("invalid config " + path.string() + ": " + e.what());
  }
  return cfg;
}

}  // namespace trialrank

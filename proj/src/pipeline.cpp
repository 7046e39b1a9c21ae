#include "trialrank/pipeline.hpp"

#include <iostream>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"
#include "trialrank/ingest.hpp"
#include "trialrank/lda.hpp"
#include "trialrank/pca.hpp"
#include "trialrank/split.hpp"
#include "trialrank/vocabulary.hpp"

using json = nlohmann::json;

namespace trialrank::pipeline {

namespace {

std::filesystem::path manifest_path(const RunConfig& cfg, const std::string& stage) {
  return cfg.out / (stage + ".manifest.json");
}

void write_manifest(const RunConfig& cfg, const std::string& stage, json extra,
                    const std::vector<std::string>& upstream_stages) {
  extra["stage"] = stage;
  extra["format_version"] = 1;
  extra["settings"] = cfg.settings_fingerprint();
  json upstream = json::object();
  for (const auto& up : upstream_stages)
    upstream[up] = hash_hex(hash_file(manifest_path(cfg, up).string()));
  extra["upstream"] = std::move(upstream);
  atomic_write_text(manifest_path(cfg, stage), extra.dump(2) + "\n");
}

json load_manifest(const RunConfig& cfg, const std::string& stage) {
  auto path = manifest_path(cfg, stage);
  if (!std::filesystem::exists(path))
    throw ValidationError("missing manifest for stage '" + stage +
                          "': run that stage first (" + path.string() + ")");
  json doc = json::parse(read_text(path));
  if (doc.value("settings", "") != cfg.settings_fingerprint())
    throw ValidationError("stage '" + stage +
                          "' was produced with different settings; expected '" +
                          cfg.settings_fingerprint() + "', found '" +
                          doc.value("settings", "") + "'");
  return doc;
}

Corpus load_stage_corpus(const RunConfig& cfg) {
  return load_snapshot(cfg.out / "corpus.json");
}

// The matrix the ranking method consumes: reduced when a reduction ran,
// otherwise the full-dimension features.
FeatureMatrix load_method_features(const RunConfig& cfg) {
  if (cfg.reduce_method == ReduceMethod::none)
    return load_feature_matrix(cfg.out / "features.bin");
  return load_feature_matrix(cfg.out / "reduced.bin");
}

std::string method_label(const RunConfig& cfg) {
  std::string reduce = cfg.reduce_method == ReduceMethod::none
                           ? std::string(to_string(cfg.weighting))
                           : std::string(to_string(cfg.reduce_method)) + "-" +
                                 std::to_string(cfg.reduce_k);
  if (cfg.method == MethodName::simrank)
    return "simrank_" + std::string(to_string(cfg.metric)) + "_" +
           std::string(to_string(cfg.aggregation)) + "_" + reduce;
  return "matfac_k" + std::to_string(cfg.matfac_hp.k) + "_" + reduce;
}

}  // namespace

void run_ingest(const RunConfig& cfg) {
  std::filesystem::create_directories(cfg.out);
  IngestOptions opts;
  opts.strip_markup = cfg.strip_markup;
  opts.status_filter = cfg.status_filter;
  Corpus corpus;
  if (std::filesystem::is_directory(cfg.corpus)) {
    corpus = load_corpus(cfg.corpus, opts);
  } else if (std::filesystem::is_regular_file(cfg.corpus)) {
    corpus = load_snapshot(cfg.corpus);
  } else {
    throw ValidationError("corpus path does not exist: " + cfg.corpus.string());
  }
  if (corpus.records.empty())
    std::cerr << "warning: ingested corpus is empty\n";
  save_snapshot(corpus, cfg.out / "corpus.json");
  write_manifest(cfg, "ingest",
                 json{{"corpus_hash", hash_hex(corpus.content_hash())},
                      {"record_count", corpus.records.size()},
                      {"markup_stripped", cfg.strip_markup},
                      {"outputs",
                       {{"corpus.json",
                         hash_hex(hash_file((cfg.out / "corpus.json").string()))}}}},
                 {});
}

void run_featurize(const RunConfig& cfg) {
  load_manifest(cfg, "ingest");
  Corpus corpus = load_stage_corpus(cfg);
  if (corpus.records.empty())
    throw ValidationError("cannot featurize an empty corpus");
  Vocabulary vocab = build_vocabulary(corpus, cfg.min_df);
  FeatureMatrix features = vectorize(corpus, vocab, cfg.weighting, cfg.tfidf);
  save_vocabulary(vocab, cfg.out / "vocab.txt");
  save_feature_matrix(features, cfg.out / "features.bin");
  write_manifest(
      cfg, "featurize",
      json{{"vocab_hash", hash_hex(vocab.content_hash())},
           {"vocab_terms", vocab.size()},
           {"feature_hash", hash_hex(features.content_hash())},
           {"outputs",
            {{"vocab.txt", hash_hex(hash_file((cfg.out / "vocab.txt").string()))},
             {"features.bin", hash_hex(hash_file((cfg.out / "features.bin").string()))}}}},
      {"ingest"});
}

void run_reduce(const RunConfig& cfg) {
  load_manifest(cfg, "featurize");
  if (cfg.reduce_method == ReduceMethod::none) {
    write_manifest(cfg, "reduce", json{{"method", "none"}}, {"featurize"});
    return;
  }
  Vocabulary vocab = load_vocabulary(cfg.out / "vocab.txt");
  json extra{{"method", to_string(cfg.reduce_method)}, {"k", cfg.reduce_k}};
  if (cfg.reduce_method == ReduceMethod::pca) {
    FeatureMatrix features = load_feature_matrix(cfg.out / "features.bin");
    if (features.weighting == Weighting::binary)
      throw ValidationError("PCA reduction needs tfidf or frequency features");
    PcaModel model = fit_pca(features, cfg.reduce_k, cfg.seed);
    FeatureMatrix reduced = transform_pca(model, features);
    save_pca(model, cfg.out / "pca.bin");
    save_feature_matrix(reduced, cfg.out / "reduced.bin");
    extra["model_hash"] = hash_hex(model.content_hash());
    extra["outputs"] = {
        {"pca.bin", hash_hex(hash_file((cfg.out / "pca.bin").string()))},
        {"reduced.bin", hash_hex(hash_file((cfg.out / "reduced.bin").string()))}};
  } else {
    // LDA always consumes counts, whatever weighting the ranking uses
    Corpus corpus = load_stage_corpus(cfg);
    FeatureMatrix counts = vectorize(corpus, vocab, Weighting::frequency);
    LdaModel model = fit_lda(counts, cfg.reduce_k, cfg.lda_alpha, cfg.lda_beta,
                             cfg.lda_sweeps, cfg.seed);
    FeatureMatrix reduced = lda_transform(model, counts, cfg.seed);
    save_lda(model, cfg.out / "lda.bin");
    save_feature_matrix(reduced, cfg.out / "reduced.bin");
    extra["model_hash"] = hash_hex(model.content_hash());
    extra["outputs"] = {
        {"lda.bin", hash_hex(hash_file((cfg.out / "lda.bin").string()))},
        {"reduced.bin", hash_hex(hash_file((cfg.out / "reduced.bin").string()))}};
  }
  write_manifest(cfg, "reduce", std::move(extra), {"featurize"});
}

void run_split(const RunConfig& cfg) {
  load_manifest(cfg, "ingest");
  Corpus corpus = load_stage_corpus(cfg);
  if (cfg.links.empty())
    throw ValidationError("config has no links path; the split stage needs one");
  auto links = load_links(cfg.links, corpus);
  if (links.duplicate_pairs_dropped > 0)
    std::cerr << "warning: dropped " << links.duplicate_pairs_dropped
              << " duplicate link pair(s)\n";
  SplitSpec split = make_split(links.reviews, corpus, cfg.min_train);
  for (const auto& w : split.warnings) std::cerr << "warning: " << w << "\n";
  if (split.reviews.empty())
    throw ValidationError("no review has enough links to split (need more than " +
                          std::to_string(cfg.min_train) + ")");
  save_split(split, cfg.out / "split.json");
  write_manifest(
      cfg, "split",
      json{{"split_hash", hash_hex(split.content_hash())},
           {"reviews", split.reviews.size()},
           {"outputs",
            {{"split.json", hash_hex(hash_file((cfg.out / "split.json").string()))}}}},
      {"ingest"});
}

void run_rank(const RunConfig& cfg) {
  load_manifest(cfg, "featurize");
  json reduce_manifest = load_manifest(cfg, "reduce");
  load_manifest(cfg, "split");

  Corpus corpus = load_stage_corpus(cfg);
  Vocabulary vocab = load_vocabulary(cfg.out / "vocab.txt");
  SplitSpec split = load_split(cfg.out / "split.json");
  FeatureMatrix features = load_method_features(cfg);

  if (split.corpus_hash != corpus.content_hash())
    throw ValidationError("split was built against a different corpus: split has " +
                          hash_hex(split.corpus_hash) + ", corpus is " +
                          hash_hex(corpus.content_hash()));
  if (cfg.reduce_method == ReduceMethod::none) {
    if (features.axis_hash != vocab.content_hash())
      throw ValidationError("feature matrix vocabulary hash " +
                            hash_hex(features.axis_hash) +
                            " does not match vocabulary " +
                            hash_hex(vocab.content_hash()) +
                            "; rebuild features with the current settings");
  } else {
    std::uint64_t model_hash =
        std::stoull(reduce_manifest.at("model_hash").get<std::string>(), nullptr, 16);
    if (features.axis_hash != model_hash)
      throw ValidationError("reduced matrix model hash " + hash_hex(features.axis_hash) +
                            " does not match reduction model " + hash_hex(model_hash));
  }

  auto ranked_dir = cfg.out / "ranked";
  std::filesystem::create_directories(ranked_dir);
  json outputs = json::object();
  json extra{{"method", method_label(cfg)}};

  if (cfg.method == MethodName::simrank) {
    for (const auto& review : split.reviews) {
      std::set<std::string> train(review.train_ids.begin(), review.train_ids.end());
      auto scores = score_candidates(features, train, cfg.metric, cfg.aggregation);
      RankedList list = rank(scores, features.row_ids, train, review.review_id);
      auto path = ranked_dir / (review.review_id + ".csv");
      save_ranked_list(list, path,
                       "metric " + std::string(to_string(cfg.metric)) + " aggregation " +
                           std::string(to_string(cfg.aggregation)) + " features " +
                           hash_hex(features.content_hash()));
      outputs["ranked/" + review.review_id + ".csv"] = hash_hex(hash_file(path.string()));
    }
  } else {
    LinkMatrix t = build_link_matrix(split, corpus);
    FactorModel model = fit(features, t, cfg.matfac_hp);
    save_factor_model(model, cfg.out / "model.bin");
    save_trace_csv(model, cfg.out / "trace.csv");
    outputs["model.bin"] = hash_hex(hash_file((cfg.out / "model.bin").string()));
    outputs["trace.csv"] = hash_hex(hash_file((cfg.out / "trace.csv").string()));
    Eigen::MatrixXd scores = score_reviews(model);
    for (std::size_t v = 0; v < split.reviews.size(); v++) {
      const auto& review = split.reviews[v];
      std::set<std::string> train(review.train_ids.begin(), review.train_ids.end());
      RankedList list = rank_for_review(scores, t, v, train);
      auto path = ranked_dir / (review.review_id + ".csv");
      save_ranked_list(list, path,
                       "matfac k " + std::to_string(cfg.matfac_hp.k) + " features " +
                           hash_hex(features.content_hash()));
      outputs["ranked/" + review.review_id + ".csv"] = hash_hex(hash_file(path.string()));
    }
    extra["best_iteration"] = model.best_iteration;
    extra["best_rmse"] = model.trace[model.best_iteration];
  }
  extra["outputs"] = std::move(outputs);
  write_manifest(cfg, "rank", std::move(extra), {"featurize", "reduce", "split"});
}

EvalReport run_evaluate(const RunConfig& cfg) {
  json rank_manifest = load_manifest(cfg, "rank");
  if (rank_manifest.value("method", std::string{}) != method_label(cfg))
    throw ValidationError("ranked artifacts were produced by '" +
                          rank_manifest.value("method", std::string{}) +
                          "' but the config asks for '" + method_label(cfg) +
                          "'; re-run the rank stage");
  Corpus corpus = load_stage_corpus(cfg);
  SplitSpec split = load_split(cfg.out / "split.json");

  std::vector<LinkRank> link_ranks;
  for (const auto& review : split.reviews) {
    RankedList list = load_ranked_list(cfg.out / "ranked" / (review.review_id + ".csv"));
    std::map<std::string, std::size_t> rank_of;
    for (const auto& e : list.entries) rank_of[e.trial_id] = e.rank;
    for (const auto& test_id : review.test_ids) {
      auto it = rank_of.find(test_id);
      if (it == rank_of.end())
        throw ValidationError("test link " + test_id + " missing from ranked list of " +
                              review.review_id);
      link_ranks.push_back({review.review_id, test_id, it->second});
    }
  }
  const std::size_t n_candidates = corpus.records.size() - cfg.min_train;
  EvalReport report = evaluate(link_ranks, n_candidates, method_label(cfg), cfg.wss_variant);
  emit_report(report, cfg.out / "eval");
  json outputs;
  for (const char* f : {"ranks.csv", "recall_curve.csv", "summary.csv"})
    outputs[std::string("eval/") + f] =
        hash_hex(hash_file((cfg.out / "eval" / f).string()));
  write_manifest(cfg, "evaluate",
                 json{{"median_rank", report.median_rank},
                      {"wss95", report.wss95},
                      {"n_candidates", n_candidates},
                      {"outputs", std::move(outputs)}},
                 {"rank"});
  return report;
}

void run_all(const RunConfig& cfg) {
  run_ingest(cfg);
  run_featurize(cfg);
  run_reduce(cfg);
  run_split(cfg);
  run_rank(cfg);
  run_evaluate(cfg);
}

void run_sweep(const RunConfig& cfg) {
  if (cfg.sweep_matfac_k.empty() && cfg.sweep_simrank_metrics.empty())
    throw ValidationError("sweep config has no grid (sweep.matfac_k / sweep.simrank_metric)");
  std::vector<EvalReport> reports;
  auto run_point = [&](RunConfig sub) {
    std::filesystem::create_directories(sub.out);
    run_ingest(sub);
    run_featurize(sub);
    run_reduce(sub);
    run_split(sub);
    run_rank(sub);
    reports.push_back(run_evaluate(sub));
  };
  for (auto k : cfg.sweep_matfac_k) {
    RunConfig sub = cfg;
    sub.method = MethodName::matfac;
    sub.matfac_hp.k = k;
    sub.out = cfg.out / ("matfac_k" + std::to_string(k));
    run_point(sub);
  }
  for (const auto& metric : cfg.sweep_simrank_metrics) {
    RunConfig sub = cfg;
    sub.method = MethodName::simrank;
    sub.metric = metric_from_string(metric);
    sub.out = cfg.out / ("simrank_" + metric);
    run_point(sub);
  }
  std::filesystem::create_directories(cfg.out);
  emit_summary(reports, cfg.out / "summary.csv");
}

}  // namespace trialrank::pipeline

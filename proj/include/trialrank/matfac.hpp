#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "trialrank/feature_matrix.hpp"
#include "trialrank/simrank.hpp"

namespace trialrank {

enum class LinkMask { train, test, unknown };

// Binary trials x reviews inclusion matrix. Absences are structural
// zeros; every stored link has value 1.
struct LinkMatrix {
  std::vector<std::string> trial_ids;   // U, corpus row order
  std::vector<std::string> review_ids;  // V, sorted

  struct Link {
    std::uint32_t u, v;
    LinkMask mask;
  };
  std::vector<Link> links;

  std::size_t trials() const { return trial_ids.size(); }
  std::size_t reviews() const { return review_ids.size(); }

  // train links grouped by trial row, then by review column
  std::vector<std::vector<std::pair<std::uint32_t, double>>> train_by_trial() const;
  std::vector<std::vector<std::uint32_t>> train_by_review() const;
  std::uint64_t content_hash() const;
};

enum class RmseVariant { both, r_only, t_only };
RmseVariant rmse_variant_from_string(const std::string& s);
const char* to_string(RmseVariant v);

struct Hyperparams {
  std::size_t k = 20;
  double lambda = 0.001;       // regularization weight
  double lambda_t = 0.01;      // link-loss weight
  double learning_rate = 1e-3;
  std::size_t max_iterations = 5000;
  std::uint64_t seed = 0;
  double init_scale = 0.01;
  RmseVariant rmse_variant = RmseVariant::both;

  void validate() const;  // throws on out-of-range values
};

struct FactorModel {
  Eigen::MatrixXd p;  // U x K, trial-latent (shared)
  Eigen::MatrixXd q;  // J x K, feature-latent
  Eigen::MatrixXd w;  // V x K, review-latent
  std::vector<double> trace;  // per-iteration RMSE
  std::size_t best_iteration = 0;
  Hyperparams hyperparams;
  std::uint64_t feature_hash = 0;
  std::uint64_t link_hash = 0;

  std::uint64_t content_hash() const;
};

struct Gradients {
  Eigen::MatrixXd dp, dq, dw;
};

FactorModel init_model(std::size_t trials, std::size_t features, std::size_t reviews,
                       const Hyperparams& hp);

// Squared-error objective: full (u,j) sum over R, train links only over T,
// L2 regularization on P, Q, W.
double loss(const FactorModel& model, const Eigen::MatrixXd& r, const LinkMatrix& t,
            Exec exec = Exec::parallel);

// Full-batch gradients; per-row scoping matches the loss.
Gradients gradients(const FactorModel& model, const Eigen::MatrixXd& r,
                    const LinkMatrix& t, Exec exec = Exec::parallel);

// Gradient descent with a per-iteration RMSE trace; returns the snapshot
// from the minimum-RMSE iteration. Throws on divergence, naming the
// iteration.
FactorModel fit(const FeatureMatrix& features, const LinkMatrix& t, const Hyperparams& hp,
                Exec exec = Exec::parallel);

// T_hat = P * W^T
Eigen::MatrixXd score_reviews(const FactorModel& model);

// Ranks one review's column of T_hat, excluding its train-linked trials.
RankedList rank_for_review(const Eigen::MatrixXd& scores, const LinkMatrix& t,
                           std::size_t review_index,
                           const std::set<std::string>& excluded);

void save_factor_model(const FactorModel& m, const std::filesystem::path& path);
FactorModel load_factor_model(const std::filesystem::path& path);
// "iteration,rmse" CSV
void save_trace_csv(const FactorModel& m, const std::filesystem::path& path);

}  // namespace trialrank

#include "trialrank/matfac.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <omp.h>

#include "trialrank/container.hpp"
#include "trialrank/hash.hpp"

namespace trialrank {

std::vector<std::vector<std::pair<std::uint32_t, double>>> LinkMatrix::train_by_trial() const {
  std::vector<std::vector<std::pair<std::uint32_t, double>>> out(trials());
  for (const auto& l : links)
    if (l.mask == LinkMask::train) out[l.u].emplace_back(l.v, 1.0);
  return out;
}

std::vector<std::vector<std::uint32_t>> LinkMatrix::train_by_review() const {
  std::vector<std::vector<std::uint32_t>> out(reviews());
  for (const auto& l : links)
    if (l.mask == LinkMask::train) out[l.v].push_back(l.u);
  return out;
}

std::uint64_t LinkMatrix::content_hash() const {
  Fnv1a h;
  for (const auto& id : trial_ids) h.update(id);
  for (const auto& id : review_ids) h.update(id);
  for (const auto& l : links) {
    h.update_pod(l.u);
    h.update_pod(l.v);
    h.update_pod(l.mask);
  }
  return h.digest();
}

RmseVariant rmse_variant_from_string(const std::string& s) {
  if (s == "both") return RmseVariant::both;
  if (s == "r_only") return RmseVariant::r_only;
  if (s == "t_only") return RmseVariant::t_only;
  throw std::runtime_error("unknown rmse variant: " + s);
}

const char* to_string(RmseVariant v) {
  switch (v) {
    case RmseVariant::both: return "both";
    case RmseVariant::r_only: return "r_only";
    case RmseVariant::t_only: return "t_only";
  }
  return "?";
}

void Hyperparams::validate() const {
  if (k < 1) throw std::runtime_error("latent factor count must be >= 1");
  if (lambda <= 0) throw std::runtime_error("lambda must be positive");
  if (lambda_t <= 0) throw std::runtime_error("lambda_t must be positive");
  if (learning_rate <= 0) throw std::runtime_error("learning_rate must be positive");
  if (max_iterations < 1) throw std::runtime_error("max_iterations must be >= 1");
  if (init_scale <= 0) throw std::runtime_error("init_scale must be positive");
}

std::uint64_t FactorModel::content_hash() const {
  Fnv1a h;
  h.update(p.data(), static_cast<std::size_t>(p.size()) * sizeof(double));
  h.update(q.data(), static_cast<std::size_t>(q.size()) * sizeof(double));
  h.update(w.data(), static_cast<std::size_t>(w.size()) * sizeof(double));
  h.update_pod(feature_hash);
  h.update_pod(link_hash);
  return h.digest();
}

FactorModel init_model(std::size_t trials, std::size_t features, std::size_t reviews,
                       const Hyperparams& hp) {
  hp.validate();
  FactorModel m;
  m.hyperparams = hp;
  std::mt19937_64 rng(hp.seed);
  std::uniform_real_distribution<double> unif(0.0, hp.init_scale);
  auto fill = [&](Eigen::MatrixXd& mat, std::size_t rows) {
    mat.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(hp.k));
    // row-major fill so the draw order is the natural reading order
    for (Eigen::Index i = 0; i < mat.rows(); i++)
      for (Eigen::Index j = 0; j < mat.cols(); j++) mat(i, j) = unif(rng);
  };
  fill(m.p, trials);
  fill(m.q, features);
  fill(m.w, reviews);
  return m;
}

namespace {

void check_dims(const FactorModel& m, const Eigen::MatrixXd& r, const LinkMatrix& t) {
  if (m.p.rows() != r.rows() || m.q.rows() != r.cols() ||
      m.p.rows() != static_cast<Eigen::Index>(t.trials()) ||
      m.w.rows() != static_cast<Eigen::Index>(t.reviews()) ||
      m.p.cols() != m.q.cols() || m.p.cols() != m.w.cols())
    throw std::runtime_error("factor model dimensions do not match R / T");
}

struct ResidualSums {
  double r_sq = 0;       // sum of squared feature residuals
  double t_sq = 0;       // sum of squared train-link residuals
  std::size_t r_n = 0;
  std::size_t t_n = 0;
};

// Fixed-order accumulation: per-trial partials summed serially, so the
// result is independent of thread count.
ResidualSums residual_sums(const FactorModel& m, const Eigen::MatrixXd& r,
                           const std::vector<std::vector<std::pair<std::uint32_t, double>>>& train,
                           Exec exec) {
  const std::size_t u_count = static_cast<std::size_t>(r.rows());
  std::vector<double> r_part(u_count, 0.0), t_part(u_count, 0.0);
  std::size_t t_links = 0;

  auto row_work = [&](std::size_t u) {
    const Eigen::Index ui = static_cast<Eigen::Index>(u);
    Eigen::VectorXd rhat = m.q * m.p.row(ui).transpose();
    double acc = 0;
    for (Eigen::Index j = 0; j < r.cols(); j++) {
      double e = rhat(j) - r(ui, j);
      acc += e * e;
    }
    r_part[u] = acc;
    double tacc = 0;
    for (const auto& [v, tv] : train[u]) {
      double e = m.p.row(ui).dot(m.w.row(static_cast<Eigen::Index>(v))) - tv;
      tacc += e * e;
    }
    t_part[u] = tacc;
  };

  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t u = 0; u < static_cast<std::int64_t>(u_count); u++)
      row_work(static_cast<std::size_t>(u));
  } else {
    for (std::size_t u = 0; u < u_count; u++) row_work(u);
  }

  ResidualSums s;
  for (std::size_t u = 0; u < u_count; u++) {
    s.r_sq += r_part[u];
    s.t_sq += t_part[u];
    t_links += train[u].size();
  }
  s.r_n = u_count * static_cast<std::size_t>(r.cols());
  s.t_n = t_links;
  return s;
}

double rmse_from_sums(const ResidualSums& s, RmseVariant variant) {
  double sq = 0;
  std::size_t n = 0;
  if (variant == RmseVariant::both || variant == RmseVariant::r_only) {
    sq += s.r_sq;
    n += s.r_n;
  }
  if (variant == RmseVariant::both || variant == RmseVariant::t_only) {
    sq += s.t_sq;
    n += s.t_n;
  }
  return n == 0 ? 0.0 : std::sqrt(sq / static_cast<double>(n));
}

}  // namespace

double loss(const FactorModel& m, const Eigen::MatrixXd& r, const LinkMatrix& t, Exec exec) {
  check_dims(m, r, t);
  auto train = t.train_by_trial();
  ResidualSums s = residual_sums(m, r, train, exec);
  const double lambda = m.hyperparams.lambda;
  const double lambda_t = m.hyperparams.lambda_t;
  double reg = m.p.squaredNorm() + m.q.squaredNorm() + m.w.squaredNorm();
  return 0.5 * s.r_sq + 0.5 * lambda_t * s.t_sq + 0.5 * lambda * reg;
}

Gradients gradients(const FactorModel& m, const Eigen::MatrixXd& r, const LinkMatrix& t,
                    Exec exec) {
  check_dims(m, r, t);
  const double lambda = m.hyperparams.lambda;
  const double lambda_t = m.hyperparams.lambda_t;
  auto train_u = t.train_by_trial();
  auto train_v = t.train_by_review();

  // E_R = P Q^T - R, dense
  Eigen::MatrixXd e_r = m.p * m.q.transpose() - r;

  Gradients g;
  g.dp.resize(m.p.rows(), m.p.cols());
  g.dq.resize(m.q.rows(), m.q.cols());
  g.dw.resize(m.w.rows(), m.w.cols());

  auto dp_row = [&](std::size_t u) {
    const Eigen::Index ui = static_cast<Eigen::Index>(u);
    Eigen::RowVectorXd grad = e_r.row(ui) * m.q;
    for (const auto& [v, tv] : train_u[u]) {
      const Eigen::Index vi = static_cast<Eigen::Index>(v);
      double e_uv = m.p.row(ui).dot(m.w.row(vi)) - tv;
      grad += lambda_t * e_uv * m.w.row(vi);
    }
    g.dp.row(ui) = grad + lambda * m.p.row(ui);
  };
  auto dq_row = [&](std::size_t j) {
    const Eigen::Index ji = static_cast<Eigen::Index>(j);
    g.dq.row(ji) = e_r.col(ji).transpose() * m.p + lambda * m.q.row(ji);
  };
  auto dw_row = [&](std::size_t v) {
    const Eigen::Index vi = static_cast<Eigen::Index>(v);
    Eigen::RowVectorXd grad = Eigen::RowVectorXd::Zero(m.w.cols());
    for (auto u : train_v[v]) {
      const Eigen::Index ui = static_cast<Eigen::Index>(u);
      double e_uv = m.p.row(ui).dot(m.w.row(vi)) - 1.0;
      grad += e_uv * m.p.row(ui);
    }
    g.dw.row(vi) = lambda_t * grad + lambda * m.w.row(vi);
  };

  if (exec == Exec::parallel) {
#pragma omp parallel
    {
#pragma omp for schedule(static) nowait
      for (std::int64_t u = 0; u < m.p.rows(); u++) dp_row(static_cast<std::size_t>(u));
#pragma omp for schedule(static) nowait
      for (std::int64_t j = 0; j < m.q.rows(); j++) dq_row(static_cast<std::size_t>(j));
#pragma omp for schedule(static)
      for (std::int64_t v = 0; v < m.w.rows(); v++) dw_row(static_cast<std::size_t>(v));
    }
  } else {
    for (std::size_t u = 0; u < static_cast<std::size_t>(m.p.rows()); u++) dp_row(u);
    for (std::size_t j = 0; j < static_cast<std::size_t>(m.q.rows()); j++) dq_row(j);
    for (std::size_t v = 0; v < static_cast<std::size_t>(m.w.rows()); v++) dw_row(v);
  }
  return g;
}

FactorModel fit(const FeatureMatrix& features, const LinkMatrix& t, const Hyperparams& hp,
                Exec exec) {
  hp.validate();
  if (features.rows() != t.trials())
    throw std::runtime_error("feature matrix rows do not match link matrix trials");
  {
    auto by_review = t.train_by_review();
    for (std::size_t v = 0; v < by_review.size(); v++)
      if (by_review[v].empty())
        throw std::runtime_error("review " + t.review_ids[v] + " has no train links");
  }

  Eigen::MatrixXd r = features.to_dense();
  FactorModel model = init_model(t.trials(), features.cols, t.reviews(), hp);
  model.feature_hash = features.content_hash();
  model.link_hash = t.content_hash();
  auto train_u = t.train_by_trial();

  Eigen::MatrixXd best_p = model.p, best_q = model.q, best_w = model.w;
  double best_rmse = std::numeric_limits<double>::infinity();

  for (std::size_t it = 0; it < hp.max_iterations; it++) {
    Gradients g = gradients(model, r, t, exec);
    model.p -= hp.learning_rate * g.dp;
    model.q -= hp.learning_rate * g.dq;
    model.w -= hp.learning_rate * g.dw;

    ResidualSums s = residual_sums(model, r, train_u, exec);
    double rmse = rmse_from_sums(s, hp.rmse_variant);
    if (!std::isfinite(rmse))
      throw std::runtime_error(
          "training diverged at iteration " + std::to_string(it + 1) +
          " (non-finite error); try a smaller learning_rate");
    model.trace.push_back(rmse);
    if (rmse < best_rmse) {
      best_rmse = rmse;
      model.best_iteration = it;
      best_p = model.p;
      best_q = model.q;
      best_w = model.w;
    }
  }
  model.p = std::move(best_p);
  model.q = std::move(best_q);
  model.w = std::move(best_w);
  return model;
}

Eigen::MatrixXd score_reviews(const FactorModel& model) {
  return model.p * model.w.transpose();
}

RankedList rank_for_review(const Eigen::MatrixXd& scores, const LinkMatrix& t,
                           std::size_t review_index,
                           const std::set<std::string>& excluded) {
  if (review_index >= t.reviews())
    throw std::runtime_error("review index out of range");
  std::vector<double> column(t.trials());
  for (std::size_t u = 0; u < t.trials(); u++)
    column[u] = scores(static_cast<Eigen::Index>(u), static_cast<Eigen::Index>(review_index));
  return rank(column, t.trial_ids, excluded, t.review_ids[review_index]);
}

void save_factor_model(const FactorModel& m, const std::filesystem::path& path) {
  atomic_write(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.header("factor_model");
    w.u64(m.hyperparams.k);
    w.f64(m.hyperparams.lambda);
    w.f64(m.hyperparams.lambda_t);
    w.f64(m.hyperparams.learning_rate);
    w.u64(m.hyperparams.max_iterations);
    w.u64(m.hyperparams.seed);
    w.f64(m.hyperparams.init_scale);
    w.str(to_string(m.hyperparams.rmse_variant));
    w.u64(m.feature_hash);
    w.u64(m.link_hash);
    w.u64(static_cast<std::uint64_t>(m.p.rows()));
    w.u64(static_cast<std::uint64_t>(m.q.rows()));
    w.u64(static_cast<std::uint64_t>(m.w.rows()));
    w.f64_array(m.p.data(), static_cast<std::size_t>(m.p.size()));
    w.f64_array(m.q.data(), static_cast<std::size_t>(m.q.size()));
    w.f64_array(m.w.data(), static_cast<std::size_t>(m.w.size()));
    w.u64(m.best_iteration);
    w.f64_array(m.trace.data(), m.trace.size());
  });
}

FactorModel load_factor_model(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open factor model: " + path.string());
  BinaryReader r(is, path.string());
  r.header("factor_model");
  FactorModel m;
  m.hyperparams.k = r.u64();
  m.hyperparams.lambda = r.f64();
  m.hyperparams.lambda_t = r.f64();
  m.hyperparams.learning_rate = r.f64();
  m.hyperparams.max_iterations = r.u64();
  m.hyperparams.seed = r.u64();
  m.hyperparams.init_scale = r.f64();
  m.hyperparams.rmse_variant = rmse_variant_from_string(r.str());
  m.feature_hash = r.u64();
  m.link_hash = r.u64();
  std::uint64_t u = r.u64(), j = r.u64(), v = r.u64();
  auto pd = r.f64_array();
  auto qd = r.f64_array();
  auto wd = r.f64_array();
  const auto k = static_cast<Eigen::Index>(m.hyperparams.k);
  if (pd.size() != u * m.hyperparams.k || qd.size() != j * m.hyperparams.k ||
      wd.size() != v * m.hyperparams.k)
    throw std::runtime_error("inconsistent factor model sections in " + path.string());
  m.p = Eigen::Map<Eigen::MatrixXd>(pd.data(), static_cast<Eigen::Index>(u), k);
  m.q = Eigen::Map<Eigen::MatrixXd>(qd.data(), static_cast<Eigen::Index>(j), k);
  m.w = Eigen::Map<Eigen::MatrixXd>(wd.data(), static_cast<Eigen::Index>(v), k);
  m.best_iteration = r.u64();
  m.trace = r.f64_array();
  return m;
}

void save_trace_csv(const FactorModel& m, const std::filesystem::path& path) {
  std::ostringstream os;
  os << "# rmse variant: " << to_string(m.hyperparams.rmse_variant) << "\n";
  os << "iteration,rmse\n";
  char buf[64];
  for (std::size_t i = 0; i < m.trace.size(); i++) {
    std::snprintf(buf, sizeof(buf), "%.17g", m.trace[i]);
    os << (i + 1) << ',' << buf << '\n';
  }
  atomic_write_text(path, os.str());
}

}  // namespace trialrank

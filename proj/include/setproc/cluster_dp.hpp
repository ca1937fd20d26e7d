#pragma once

// Infinite Poisson point-process mixture: Gamma prior on the rate, Normal-
// inverse-Wishart prior on the Gaussian feature density, collapsed Gibbs
// sampling of the cluster labels.

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "setproc/core.hpp"
#include "setproc/error.hpp"
#include "setproc/learn.hpp"
#include "setproc/numeric.hpp"
#include "setproc/random.hpp"

namespace setproc {

// Sigma ~ IW(psi, nu), mu | Sigma ~ N(m, Sigma / kappa).
struct NiwParams {
  Vector m;
  double kappa = 1.0;
  double nu = 1.0;
  Matrix psi;

  int dim() const { return static_cast<int>(m.size()); }
};

struct DPHyper {
  double eta = 1.0;    // DP concentration
  double alpha = 1.0;  // Gamma shape of the rate
  double beta = 1.0;   // Gamma rate of the rate
  NiwParams niw;
  double unit_u = 1.0;

  int dim() const { return niw.dim(); }

  void validate() const {
    if (!(eta > 0.0) || !std::isfinite(eta)) throw DataError("DP concentration eta must be > 0");
    if (!(alpha > 0.0) || !(beta > 0.0)) throw DataError("Gamma hyperparameters alpha, beta must be > 0");
    if (!(unit_u > 0.0)) throw DataError("unit hyper-volume U must be > 0");
    const int d = dim();
    if (d < 1) throw DataError("NIW mean must be non-empty");
    if (!(niw.kappa > 0.0)) throw DataError("NIW kappa0 must be > 0");
    if (!(niw.nu > d - 1)) throw DataError("NIW nu0 must exceed d-1");
    if (niw.psi.rows() != d || niw.psi.cols() != d) throw DataError("NIW scale matrix has wrong shape");
    if ((niw.psi - niw.psi.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + niw.psi.cwiseAbs().maxCoeff())) {
      throw DataError("NIW scale matrix must be symmetric");
    }
    if (Eigen::LLT<Matrix>(niw.psi).info() != Eigen::Success) throw DataError("NIW scale matrix must be positive definite");
  }
};

// Weakly informative, data-scaled defaults: eta = alpha = 1, beta = alpha /
// mean cardinality, m0 = pooled mean, kappa0 = 0.01, nu0 = d + 2 and psi0 =
// pooled covariance (so E[Sigma] equals it).
inline DPHyper default_hyper(std::span<const PointPattern> data) {
  if (data.empty()) throw DataError("cannot derive DP hyperparameters from an empty dataset");
  const int d = data.front().dim();
  double total = 0.0;
  for (const auto& x : data) total += static_cast<double>(x.size());
  const double mean_card = total / static_cast<double>(data.size());
  if (!(mean_card > 0.0)) throw DataError("cannot derive DP hyperparameters: every pattern is empty");
  const Gaussian g = mle_gaussian(PooledFeatures::from(data, d));
  DPHyper h;
  h.beta = h.alpha / mean_card;
  h.niw = {g.mean(), 0.01, static_cast<double>(d) + 2.0, g.effective_cov()};
  return h;
}

// Sufficient statistics of a cluster, with centered feature moments.
class ClusterStats {
 public:
  explicit ClusterStats(int dim) : mean_(Vector::Zero(dim)), scatter_(Matrix::Zero(dim, dim)) {}

  std::size_t count() const { return count_; }
  std::size_t total_card() const { return total_card_; }
  std::size_t n_feat() const { return n_feat_; }
  const Vector& mean() const { return mean_; }
  const Matrix& scatter() const { return scatter_; }
  int dim() const { return static_cast<int>(mean_.size()); }
  bool empty() const { return count_ == 0; }

  void add(const PointPattern& x) {
    check_dim(x, dim());
    ++count_;
    total_card_ += x.size();
    if (x.empty()) return;
    Vector mb;
    Matrix sb;
    moments(x, mb, sb);
    const double na = static_cast<double>(n_feat_), nb = static_cast<double>(x.size());
    const double n = na + nb;
    const Vector delta = mb - mean_;
    mean_ += delta * (nb / n);
    scatter_ += sb + (na * nb / n) * (delta * delta.transpose());
    n_feat_ += x.size();
  }

  void remove(const PointPattern& x) {
    check_dim(x, dim());
    if (count_ == 0 || x.size() > n_feat_) throw DataError("removing a pattern that is not in the cluster");
    --count_;
    total_card_ -= x.size();
    if (x.empty()) return;
    if (x.size() == n_feat_) {
      n_feat_ = 0;
      mean_.setZero();
      scatter_.setZero();
      return;
    }
    Vector mb;
    Matrix sb;
    moments(x, mb, sb);
    const double n = static_cast<double>(n_feat_), nb = static_cast<double>(x.size());
    const double na = n - nb;
    const Vector ma = (n * mean_ - nb * mb) / na;
    const Vector delta = mb - ma;
    scatter_ -= sb + (na * nb / n) * (delta * delta.transpose());
    scatter_ = 0.5 * (scatter_ + scatter_.transpose());
    mean_ = ma;
    n_feat_ -= x.size();
  }

  static void moments(const PointPattern& x, Vector& mean, Matrix& scatter) {
    const Matrix& p = x.matrix();
    mean = p.rowwise().mean();
    const Matrix c = p.colwise() - mean;
    scatter = c * c.transpose();
  }

 private:
  std::size_t count_ = 0;
  std::size_t total_card_ = 0;
  std::size_t n_feat_ = 0;
  Vector mean_;
  Matrix scatter_;
};

inline ClusterStats stats_of(std::span<const PointPattern> members, int dim) {
  ClusterStats s(dim);
  for (const auto& x : members) s.add(x);
  return s;
}

// Posterior NIW parameters after observing n points with mean xbar and
// centered scatter S.
inline NiwParams niw_update(const NiwParams& p, double n, const Vector& xbar, const Matrix& scatter) {
  if (n == 0.0) return p;
  NiwParams q;
  q.kappa = p.kappa + n;
  q.nu = p.nu + n;
  q.m = (p.kappa * p.m + n * xbar) / q.kappa;
  const Vector dm = xbar - p.m;
  q.psi = p.psi + scatter + (p.kappa * n / q.kappa) * (dm * dm.transpose());
  return q;
}

inline NiwParams niw_posterior(const NiwParams& prior, const ClusterStats& s) {
  return niw_update(prior, static_cast<double>(s.n_feat()), s.mean(), s.scatter());
}

inline NiwParams niw_update(const NiwParams& p, const PointPattern& x) {
  if (x.empty()) return p;
  Vector mb;
  Matrix sb;
  ClusterStats::moments(x, mb, sb);
  return niw_update(p, static_cast<double>(x.size()), mb, sb);
}

// log of the NIW normalizer, up to terms that cancel in marginal ratios:
// log Gamma_d(nu/2) + (nu d/2) log 2 - (nu/2) log|psi| - (d/2) log kappa.
inline double niw_log_normalizer(const NiwParams& p) {
  const int d = p.dim();
  const Eigen::LLT<Matrix> llt(p.psi);
  if (llt.info() != Eigen::Success) throw NumericalError("NIW scale matrix lost positive definiteness");
  const double logdet = 2.0 * llt.matrixL().toDenseMatrix().diagonal().array().log().sum();
  return log_multigamma(0.5 * p.nu, d) + 0.5 * p.nu * d * std::numbers::ln2 - 0.5 * p.nu * logdet -
         0.5 * d * std::log(p.kappa);
}

// log of the integral of prod_{x in X} N(x; mu, Sigma) under NIW(post) given
// that `post` already absorbed the cluster's features.
inline double niw_log_predictive(const NiwParams& post, const PointPattern& x) {
  if (x.empty()) return 0.0;
  const double n = static_cast<double>(x.size());
  return niw_log_normalizer(niw_update(post, x)) - niw_log_normalizer(post) -
         0.5 * n * post.dim() * std::log(2.0 * std::numbers::pi);
}

// Gamma-Poisson part of the predictive for a cluster with `count` patterns
// and `total_card` points.
inline double card_log_predictive(std::size_t n, std::size_t count, std::size_t total_card, const DPHyper& h) {
  const double a = h.alpha + static_cast<double>(total_card);
  const double b = h.beta + static_cast<double>(count);
  const double nn = static_cast<double>(n);
  return std::lgamma(a + nn) - std::lgamma(a) + a * std::log(b) - (a + nn) * std::log1p(b);
}

// log f(X | Z): pass an empty ClusterStats for a new cluster.
inline double predictive_loglik(const PointPattern& x, const ClusterStats& stats, const DPHyper& h) {
  check_dim(x, h.dim());
  const double card = card_log_predictive(x.size(), stats.count(), stats.total_card(), h);
  return card + niw_log_predictive(niw_posterior(h.niw, stats), x) +
         static_cast<double>(x.size()) * std::log(h.unit_u);
}

// log of the joint marginal of all member patterns of one cluster (the chain
// of predictives, in closed form).
inline double cluster_log_marginal(const ClusterStats& s, const DPHyper& h) {
  const double a = h.alpha, b = h.beta;
  const double sum_n = static_cast<double>(s.total_card());
  const double m = static_cast<double>(s.count());
  const double card = a * std::log(b) - std::lgamma(a) + std::lgamma(a + sum_n) - (a + sum_n) * std::log(b + m);
  double feat = 0.0;
  if (s.n_feat() > 0) {
    feat = niw_log_normalizer(niw_posterior(h.niw, s)) - niw_log_normalizer(h.niw) -
           0.5 * static_cast<double>(s.n_feat()) * h.dim() * std::log(2.0 * std::numbers::pi);
  }
  return card + feat + sum_n * std::log(h.unit_u);
}

// Polya-urn (Chinese restaurant) log prior of a partition with the given
// cluster sizes.
inline double crp_log_prior(std::span<const std::size_t> sizes, double eta) {
  double n = 0.0, lp = 0.0;
  for (auto s : sizes) {
    n += static_cast<double>(s);
    lp += std::log(eta) + std::lgamma(static_cast<double>(s));
  }
  return lp + std::lgamma(eta) - std::lgamma(eta + n);
}

// ---------------------------------------------------------------------------
// Gibbs state
// ---------------------------------------------------------------------------

inline constexpr int kUnassigned = -1;

struct DPGibbsState {
  std::vector<int> labels;               // kUnassigned while a pattern is out of every cluster
  std::map<int, ClusterStats> clusters;  // id -> stats; ids are reused, smallest free first

  int free_id() const {
    int id = 0;
    for (const auto& [k, s] : clusters) {
      if (k != id) break;
      ++id;
    }
    return id;
  }

  void assign(std::size_t n, int id, const PointPattern& x, int dim) {
    auto it = clusters.find(id);
    if (it == clusters.end()) it = clusters.emplace(id, ClusterStats(dim)).first;
    it->second.add(x);
    labels[n] = id;
  }

  void unassign(std::size_t n, const PointPattern& x) {
    const int id = labels[n];
    if (id == kUnassigned) return;
    auto it = clusters.find(id);
    if (it == clusters.end()) throw DataError("Gibbs state refers to a missing cluster");
    it->second.remove(x);
    if (it->second.empty()) clusters.erase(it);
    labels[n] = kUnassigned;
  }

  std::size_t num_clusters() const { return clusters.size(); }
};

inline DPGibbsState rebuild_state(std::span<const int> labels, std::span<const PointPattern> data, int dim) {
  DPGibbsState s;
  s.labels.assign(labels.begin(), labels.end());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    if (labels[n] == kUnassigned) continue;
    auto it = s.clusters.find(labels[n]);
    if (it == s.clusters.end()) it = s.clusters.emplace(labels[n], ClusterStats(dim)).first;
    it->second.add(data[n]);
  }
  return s;
}

struct Conditional {
  std::vector<int> ids;  // existing cluster ids, then kUnassigned for "new"
  std::vector<double> probs;
};

// Label conditional of pattern n, which must currently be unassigned.
// Existing clusters weigh popularity * predictive, a new cluster eta * predictive.
inline Conditional gibbs_conditional(std::size_t n, const DPGibbsState& state, std::span<const PointPattern> data,
                                     const DPHyper& h) {
  if (state.labels[n] != kUnassigned) throw DataError("pattern must be removed from its cluster first");
  const auto& x = data[n];
  Conditional c;
  std::vector<double> logw;
  for (const auto& [id, s] : state.clusters) {
    c.ids.push_back(id);
    logw.push_back(std::log(static_cast<double>(s.count())) + predictive_loglik(x, s, h));
  }
  c.ids.push_back(kUnassigned);
  logw.push_back(std::log(h.eta) + predictive_loglik(x, ClusterStats(h.dim()), h));
  c.probs = softmax(logw);
  return c;
}

inline std::size_t draw(std::span<const double> probs, Rng& rng) {
  const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return i;
  }
  return probs.size() - 1;
}

inline void gibbs_step(std::size_t n, DPGibbsState& state, std::span<const PointPattern> data, const DPHyper& h,
                       Rng& rng) {
  state.unassign(n, data[n]);
  const auto c = gibbs_conditional(n, state, data, h);
  const int pick = c.ids[draw(c.probs, rng)];
  state.assign(n, pick == kUnassigned ? state.free_id() : pick, data[n], h.dim());
}

// One systematic-scan sweep over n = 0..N-1.
inline void gibbs_sweep(DPGibbsState& state, std::span<const PointPattern> data, const DPHyper& h, Rng& rng) {
  for (std::size_t n = 0; n < data.size(); ++n) gibbs_step(n, state, data, h, rng);
}

// Joint log score of a partition: Polya-urn prior plus the cluster marginals.
inline double partition_log_score(const DPGibbsState& state, const DPHyper& h) {
  std::vector<std::size_t> sizes;
  double lm = 0.0;
  for (const auto& [id, s] : state.clusters) {
    sizes.push_back(s.count());
    lm += cluster_log_marginal(s, h);
  }
  return crp_log_prior(sizes, h.eta) + lm;
}

// Cluster ids renumbered 0, 1, ... in order of first appearance.
inline std::vector<int> canonical_partition(std::span<const int> labels) {
  std::map<int, int> seen;
  std::vector<int> out;
  out.reserve(labels.size());
  for (int v : labels) out.push_back(seen.emplace(v, static_cast<int>(seen.size())).first->second);
  return out;
}

struct DPResult {
  std::vector<std::vector<int>> label_samples;  // canonical labels per collected sample
  std::vector<double> scores;                   // partition_log_score per sample
  std::vector<int> point_estimate;              // highest-scoring sample (earliest on ties)
  std::vector<std::size_t> cluster_counts;      // number of clusters per collected sample
};

// Sequential Polya-urn initialization, `burnin` sweeps, then `samples`
// collected every `thin` sweeps.
inline DPResult run_dp_clustering(std::span<const PointPattern> data, const DPHyper& h, int burnin, int samples,
                                  int thin, std::uint64_t seed) {
  h.validate();
  if (data.empty()) throw DataError("cannot cluster an empty dataset");
  if (burnin < 1 || samples < 1) throw DataError("burnin and samples must be >= 1");
  if (thin < 1) throw DataError("thin must be >= 1");
  for (const auto& x : data) check_dim(x, h.dim());
  Rng rng = make_rng(seed, streams::kGibbs);
  DPGibbsState state;
  state.labels.assign(data.size(), kUnassigned);
  for (std::size_t n = 0; n < data.size(); ++n) {
    const auto c = gibbs_conditional(n, state, data, h);
    const int pick = c.ids[draw(c.probs, rng)];
    state.assign(n, pick == kUnassigned ? state.free_id() : pick, data[n], h.dim());
  }
  for (int b = 0; b < burnin; ++b) gibbs_sweep(state, data, h, rng);
  DPResult out;
  std::size_t best = 0;
  for (int s = 0; s < samples; ++s) {
    for (int t = 0; t < thin; ++t) gibbs_sweep(state, data, h, rng);
    out.label_samples.push_back(canonical_partition(state.labels));
    out.scores.push_back(partition_log_score(state, h));
    out.cluster_counts.push_back(state.num_clusters());
    if (out.scores.back() > out.scores[best]) best = out.scores.size() - 1;
  }
  out.point_estimate = out.label_samples[best];
  return out;
}

}  // namespace setproc

#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setproc/learn.hpp"
#include "setproc/models.hpp"
#include "setproc/numeric.hpp"
#include "setproc/parallel.hpp"
#include "setproc/random.hpp"

namespace setproc {

class FiniteMixture {
 public:
  FiniteMixture(std::vector<double> weights, std::vector<PointProcessModel> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) throw DataError("mixture needs at least one component");
    if (weights_.size() != components_.size()) throw DataError("mixture weight count mismatch");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("mixture weights must be finite and >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) throw DataError("mixture weights must sum to 1");
    for (const auto& m : components_)
      if (m.dim() != components_.front().dim()) throw DataError("mixture components differ in dimension");
  }

  std::size_t size() const { return components_.size(); }
  int dim() const { return components_.front().dim(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<PointProcessModel>& components() const { return components_; }

 private:
  std::vector<double> weights_;
  std::vector<PointProcessModel> components_;
};

// Patterns plus the derived quantities every M-step needs.
struct EmData {
  std::span<const PointPattern> patterns;
  PooledFeatures pooled;
  std::vector<std::size_t> cards;
  int dim = 0;

  static EmData from(std::span<const PointPattern> patterns) {
    if (patterns.empty()) throw DataError("cannot cluster an empty dataset");
    EmData out;
    out.patterns = patterns;
    out.dim = patterns.front().dim();
    out.pooled = PooledFeatures::from(patterns, out.dim);
    out.cards = cardinalities(patterns);
    return out;
  }

  std::size_t size() const { return patterns.size(); }
};

struct EStep {
  Matrix resp;                  // N x K, each row a simplex
  std::vector<double> row_ll;   // log sum_k pi_k f(X_n | theta_k)
  double loglik = 0.0;          // sum of row_ll
  std::size_t degenerate = 0;   // rows that were -inf under every component (set uniform)
};

inline EStep e_step(const FiniteMixture& m, const EmData& data, unsigned threads = max_threads()) {
  const std::size_t N = data.size(), K = m.size();
  EStep out;
  out.resp.resize(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K));
  out.row_ll.resize(N);
  std::vector<char> bad(N, 0);
  std::vector<double> logpi(K);
  for (std::size_t k = 0; k < K; ++k) logpi[k] = std::log(m.weights()[k]);
  parallel_for(
      N,
      [&](std::size_t n) {
        std::vector<double> logw(K), r(K);
        for (std::size_t k = 0; k < K; ++k) {
          logw[k] = m.weights()[k] > 0.0 ? logpi[k] + log_density(m.components()[k], data.patterns[n]) : kNegInf;
        }
        out.row_ll[n] = log_sum_exp(logw);
        bad[n] = !softmax(logw, r);
        for (std::size_t k = 0; k < K; ++k) out.resp(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k)) = r[k];
      },
      threads);
  for (std::size_t n = 0; n < N; ++n) {
    out.loglik += out.row_ll[n];
    out.degenerate += static_cast<std::size_t>(bad[n]);
  }
  if (out.degenerate > 0) {
    warn(std::to_string(out.degenerate) + " pattern(s) have zero likelihood under every component");
  }
  return out;
}

inline std::vector<double> m_step_weights(const Matrix& resp) {
  std::vector<double> pi(static_cast<std::size_t>(resp.cols()), 0.0);
  for (Eigen::Index k = 0; k < resp.cols(); ++k) {
    for (Eigen::Index n = 0; n < resp.rows(); ++n) pi[static_cast<std::size_t>(k)] += resp(n, k);
  }
  for (double& p : pi) p /= static_cast<double>(resp.rows());
  return pi;
}

inline std::vector<double> resp_column(const Matrix& resp, std::size_t k) {
  std::vector<double> w(static_cast<std::size_t>(resp.rows()));
  for (std::size_t n = 0; n < w.size(); ++n) w[n] = resp(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  return w;
}

inline constexpr double kMinClusterMass = 1e-10;

// Weighted cardinality MLE for cluster k. A categorical family without an
// explicit maximum uses the headroom rule on the whole dataset, so all
// clusters share one support.
inline CardinalityDist m_step_cardinality(const Matrix& resp, std::size_t k, std::span<const std::size_t> cards,
                                          const CardFamily& family) {
  const auto w = resp_column(resp, k);
  if (!(std::accumulate(w.begin(), w.end(), 0.0) >= kMinClusterMass)) {
    throw NumericalError("cluster " + std::to_string(k) + " has no responsibility mass");
  }
  return fit_cardinality(cards, w, family);
}

// Weighted Gaussian MLE for cluster k: every feature of X_n carries r[n][k].
inline Gaussian m_step_gaussian(const Matrix& resp, std::size_t k, const EmData& data) {
  const auto w = data.pooled.spread(resp_column(resp, k));
  return weighted_gaussian(data.pooled.points, w);
}

// Inner weighted GMM-EM for cluster k, warm-started from `warm` when given,
// otherwise from the restart scheme used by supervised learning.
inline GmmFit m_step_gmm(const Matrix& resp, std::size_t k, const EmData& data, const GmmFamily& family,
                         const GaussianMixture* warm, std::uint64_t seed) {
  const auto w = data.pooled.spread(resp_column(resp, k));
  if (!warm) {
    return weighted_gmm_fit(data.pooled.points, w, family.components, family.inner_iters, family.inner_tol,
                            family.restarts, seed);
  }
  Matrix pts;
  std::vector<double> wk;
  support_of(data.pooled.points, w, pts, wk);
  const double total = std::accumulate(wk.begin(), wk.end(), 0.0);
  if (!(total >= static_cast<double>(data.dim + 1))) {
    throw NumericalError("cluster " + std::to_string(k) + " has effective feature weight below d+1");
  }
  return fit_gmm_weighted(pts, wk, *warm, family.inner_iters, family.inner_tol);
}

struct EMOptions {
  int max_iters = 200;
  double tol = 1e-7;  // stop when the log-likelihood gain < tol * max(1, |loglik|)
  int restarts = 5;
  std::uint64_t seed = 0;
  FitOptions component;  // cardinality/feature families and U; its seed is unused
};

struct EMResult {
  FiniteMixture mixture;
  Matrix resp;
  std::vector<int> labels;
  std::vector<double> trace;  // observed-data log-likelihood after each E-step
  int iterations = 0;
  bool converged = false;
  int reseeds = 0;  // clusters re-initialized because their mass collapsed
  int restart = 0;  // which restart produced this result
};

namespace detail {

// Feature density for a cluster whose weighted fit failed: centered on its
// (weighted) feature mean, or the global mean, with the global covariance.
inline FeatureDensity fallback_feature(const Matrix& resp, std::size_t k, const EmData& data, const FeatFamily& family) {
  const auto w = data.pooled.spread(resp_column(resp, k));
  const Gaussian global = mle_gaussian(data.pooled);
  Vector mean = global.mean();
  double total = 0.0;
  Vector sum = Vector::Zero(data.dim);
  for (Eigen::Index j = 0; j < data.pooled.points.cols(); ++j) {
    total += w[static_cast<std::size_t>(j)];
    sum += w[static_cast<std::size_t>(j)] * data.pooled.points.col(j);
  }
  if (total > 0.0) mean = sum / total;
  Gaussian g(mean, global.cov());
  if (const auto* gmm = std::get_if<GmmFamily>(&family)) {
    const auto J = static_cast<std::size_t>(gmm->components);
    return GaussianMixture(std::vector<double>(J, 1.0 / static_cast<double>(J)), std::vector<Gaussian>(J, g));
  }
  return g;
}

struct MStep {
  std::optional<FiniteMixture> mixture;
  int reseeds = 0;
};

// Full M-step. Clusters with (near) zero mass take the lowest-likelihood
// pattern; clusters whose feature fit is still deficient fall back to
// fallback_feature.
inline MStep m_step(Matrix resp, const EmData& data, const FitOptions& fam, const std::vector<double>* row_ll,
                    const FiniteMixture* previous, std::uint64_t seed, unsigned threads) {
  const std::size_t K = static_cast<std::size_t>(resp.cols()), N = data.size();
  MStep out;
  std::vector<char> taken(N, 0);
  for (std::size_t k = 0; k < K; ++k) {
    const double mass = resp.col(static_cast<Eigen::Index>(k)).sum();
    if (mass >= kMinClusterMass) continue;
    std::size_t pick = N;
    for (std::size_t n = 0; n < N; ++n) {
      if (taken[n]) continue;
      const double ll = row_ll ? (*row_ll)[n] : 0.0;
      if (pick == N || ll < (row_ll ? (*row_ll)[pick] : 0.0)) pick = n;
    }
    if (pick == N) throw NumericalError("cannot reseed cluster " + std::to_string(k));
    taken[pick] = 1;
    resp.row(static_cast<Eigen::Index>(pick)).setZero();
    resp(static_cast<Eigen::Index>(pick), static_cast<Eigen::Index>(k)) = 1.0;
    ++out.reseeds;
  }

  std::vector<std::optional<CardinalityDist>> cards(K);
  std::vector<std::optional<FeatureDensity>> feats(K);
  parallel_for(
      K,
      [&](std::size_t k) {
        cards[k] = m_step_cardinality(resp, k, data.cards, fam.card);
        try {
          if (std::holds_alternative<GaussianFamily>(fam.feat)) {
            feats[k] = m_step_gaussian(resp, k, data);
          } else {
            const GaussianMixture* warm =
                previous ? std::get_if<GaussianMixture>(&previous->components()[k].feat()) : nullptr;
            feats[k] = m_step_gmm(resp, k, data, std::get<GmmFamily>(fam.feat), warm, derive_seed(seed, k)).mixture;
          }
        } catch (const NumericalError&) {
        }
      },
      threads);
  std::vector<PointProcessModel> comps;
  comps.reserve(K);
  for (std::size_t k = 0; k < K; ++k) {
    if (!feats[k]) {
      feats[k] = fallback_feature(resp, k, data, fam.feat);
      ++out.reseeds;
    }
    comps.emplace_back(std::move(*cards[k]), std::move(*feats[k]), fam.unit_u);
  }
  auto pi = m_step_weights(resp);
  const double total = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (double& p : pi) p /= total;
  out.mixture.emplace(std::move(pi), std::move(comps));
  return out;
}

}  // namespace detail

// One-hot initial responsibilities from quantile bins of the cardinality:
// patterns sorted by |X| (stable) are split into K contiguous groups.
inline Matrix cardinality_binning_init(const EmData& data, std::size_t K) {
  const std::size_t N = data.size();
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return data.cards[a] < data.cards[b]; });
  Matrix r = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K));
  for (std::size_t i = 0; i < N; ++i) r(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(i * K / N)) = 1.0;
  return r;
}

// Balanced random one-hot responsibilities (every cluster non-empty when N >= K).
inline Matrix random_onehot_init(std::size_t N, std::size_t K, Rng& rng) {
  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  Matrix r = Matrix::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(K));
  for (std::size_t i = 0; i < N; ++i) r(static_cast<Eigen::Index>(order[i]), static_cast<Eigen::Index>(i % K)) = 1.0;
  return r;
}

// A single EM run from the given initial responsibilities.
inline EMResult em_run(const EmData& data, const Matrix& init_resp, const EMOptions& opts, std::uint64_t run_seed,
                       unsigned threads = max_threads()) {
  if (opts.max_iters < 1) throw DataError("EM needs max_iters >= 1");
  if (!(opts.tol >= 0.0)) throw DataError("EM tolerance must be >= 0");
  if (static_cast<std::size_t>(init_resp.rows()) != data.size()) throw DataError("initial responsibilities have wrong row count");
  auto ms = detail::m_step(init_resp, data, opts.component, nullptr, nullptr, run_seed, threads);
  int reseeds = ms.reseeds;
  FiniteMixture mix = std::move(*ms.mixture);
  EStep es = e_step(mix, data, threads);
  std::vector<double> trace{es.loglik};
  bool converged = false;
  int it = 0;
  while (it < opts.max_iters) {
    ++it;
    ms = detail::m_step(es.resp, data, opts.component, &es.row_ll, &mix, run_seed, threads);
    reseeds += ms.reseeds;
    FiniteMixture next = std::move(*ms.mixture);
    EStep next_es = e_step(next, data, threads);
    const double gain = next_es.loglik - es.loglik;
    mix = std::move(next);
    es = std::move(next_es);
    trace.push_back(es.loglik);
    if (gain < opts.tol * std::max(1.0, std::abs(es.loglik))) {
      converged = true;
      break;
    }
  }
  std::vector<int> labels(data.size());
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const auto row = es.resp.row(static_cast<Eigen::Index>(n));
    const std::vector<double> r(row.begin(), row.end());
    labels[n] = static_cast<int>(argmax(r));
  }
  return EMResult{std::move(mix), std::move(es.resp), std::move(labels), std::move(trace), it, converged, reseeds, 0};
}

// Best of `restarts` runs by final log-likelihood (ties to the earliest).
// Run 0 starts from cardinality binning, the others from random one-hot
// assignments.
inline EMResult em_fit(std::span<const PointPattern> patterns, std::size_t K, const EMOptions& opts) {
  if (K < 1) throw DataError("EM needs K >= 1");
  if (patterns.size() < K) {
    throw DataError("EM needs at least K=" + std::to_string(K) + " patterns, got " + std::to_string(patterns.size()));
  }
  if (opts.restarts < 1) throw DataError("EM needs restarts >= 1");
  const EmData data = EmData::from(patterns);
  const auto R = static_cast<std::size_t>(opts.restarts);
  const std::uint64_t base = derive_seed(opts.seed, streams::kEmRestart);
  std::vector<std::optional<EMResult>> runs(R);
  const unsigned inner = R > 1 ? 1u : max_threads();
  parallel_for(R, [&](std::size_t r) {
    const std::uint64_t run_seed = derive_seed(base, r);
    Matrix init;
    if (r == 0) {
      init = cardinality_binning_init(data, K);
    } else {
      Rng rng(run_seed);
      init = random_onehot_init(data.size(), K, rng);
    }
    runs[r] = em_run(data, init, opts, run_seed, inner);
    runs[r]->restart = static_cast<int>(r);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < R; ++r) {
    if (runs[r]->trace.back() > runs[best]->trace.back()) best = r;
  }
  return std::move(*runs[best]);
}

}  // namespace setproc

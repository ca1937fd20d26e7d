#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "setproc/core.hpp"
#include "setproc/models.hpp"
#include "setproc/parallel.hpp"
#include "setproc/random.hpp"

namespace setproc {

// ---------------------------------------------------------------------------
// Options
// ---------------------------------------------------------------------------

struct CategoricalFamily {
  std::optional<std::size_t> max_card;  // default: max observed + 20%, rounded up
  double laplace = 1.0;
};
struct PoissonFamily {};
using CardFamily = std::variant<CategoricalFamily, PoissonFamily>;

struct GaussianFamily {};
struct GmmFamily {
  int components = 3;
  int inner_iters = 100;
  double inner_tol = 1e-8;
  int restarts = 5;
};
using FeatFamily = std::variant<GaussianFamily, GmmFamily>;

struct FitOptions {
  CardFamily card = PoissonFamily{};
  FeatFamily feat = GaussianFamily{};
  std::uint64_t seed = 0;
  double unit_u = 1.0;
};

inline std::size_t default_max_cardinality(std::size_t max_observed) {
  return (6 * max_observed + 4) / 5;  // ceil(1.2 * max_observed)
}

// ---------------------------------------------------------------------------
// Cardinality MLEs
// ---------------------------------------------------------------------------

// Weighted categorical estimate: xi_m ∝ eps + sum_n w_n [card_n == m], m = 0..M.
inline Categorical weighted_categorical_card(std::span<const std::size_t> cards, std::span<const double> weights,
                                             std::size_t max_card, double laplace) {
  if (!(laplace >= 0.0)) throw DataError("Laplace smoothing must be >= 0");
  std::vector<double> mass(max_card + 1, laplace);
  for (std::size_t n = 0; n < cards.size(); ++n) {
    if (cards[n] > max_card) {
      throw DataError("cardinality " + std::to_string(cards[n]) + " exceeds maximum cardinality " +
                      std::to_string(max_card));
    }
    mass[cards[n]] += weights[n];
  }
  return Categorical::from_weights(std::move(mass));
}

inline Categorical mle_categorical_card(std::span<const std::size_t> cards, std::size_t max_card, double laplace) {
  const std::vector<double> ones(cards.size(), 1.0);
  return weighted_categorical_card(cards, ones, max_card, laplace);
}

inline constexpr double kMinPoissonRate = 1e-12;

inline PoissonCard weighted_poisson_rate(std::span<const std::size_t> cards, std::span<const double> weights) {
  double num = 0.0;
  double den = 0.0;
  for (std::size_t n = 0; n < cards.size(); ++n) {
    num += static_cast<double>(cards[n]) * weights[n];
    den += weights[n];
  }
  if (!(den > 0.0)) throw NumericalError("Poisson rate: total weight is zero");
  double rate = num / den;
  if (!(rate > 0.0)) {
    warn("Poisson rate MLE is 0 (all patterns empty); clamped to 1e-12");
    rate = kMinPoissonRate;
  }
  return PoissonCard(rate);
}

inline PoissonCard mle_poisson_rate(std::span<const std::size_t> cards) {
  if (cards.empty()) throw DataError("Poisson rate MLE needs at least one cardinality");
  const std::vector<double> ones(cards.size(), 1.0);
  return weighted_poisson_rate(cards, ones);
}

// ---------------------------------------------------------------------------
// Pooled features in canonical order
// ---------------------------------------------------------------------------

// The disjoint union of a list of patterns, with points sorted
// lexicographically. Sums over the pool therefore run in an order that
// depends only on the multiset of pooled points, not on which pattern held
// which point.
struct PooledFeatures {
  Matrix points;                   // d x total
  std::vector<std::size_t> owner;  // index of the source pattern of each column

  int dim() const { return static_cast<int>(points.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points.cols()); }

  static PooledFeatures from(std::span<const PointPattern> patterns, int dim) {
    struct Ref {
      std::size_t pattern;
      std::size_t index;
    };
    std::vector<Ref> refs;
    for (std::size_t n = 0; n < patterns.size(); ++n) {
      check_dim(patterns[n], dim);
      for (std::size_t i = 0; i < patterns[n].size(); ++i) refs.push_back({n, i});
    }
    auto less = [&](const Ref& a, const Ref& b) {
      const auto pa = patterns[a.pattern].point(a.index);
      const auto pb = patterns[b.pattern].point(b.index);
      for (int k = 0; k < dim; ++k) {
        if (pa(k) < pb(k)) return true;
        if (pb(k) < pa(k)) return false;
      }
      return false;
    };
    std::stable_sort(refs.begin(), refs.end(), less);
    PooledFeatures out;
    out.points.resize(dim, static_cast<Eigen::Index>(refs.size()));
    out.owner.reserve(refs.size());
    for (std::size_t j = 0; j < refs.size(); ++j) {
      out.points.col(static_cast<Eigen::Index>(j)) = patterns[refs[j].pattern].point(refs[j].index);
      out.owner.push_back(refs[j].pattern);
    }
    return out;
  }

  static PooledFeatures from_points(const Matrix& pts) {
    const PointPattern single(pts);
    return from(std::span<const PointPattern>(&single, 1), single.dim());
  }

  // Per-point weights from per-pattern weights.
  std::vector<double> spread(std::span<const double> pattern_weights) const {
    std::vector<double> w(owner.size());
    for (std::size_t j = 0; j < owner.size(); ++j) w[j] = pattern_weights[owner[j]];
    return w;
  }
};

// ---------------------------------------------------------------------------
// Gaussian feature MLE
// ---------------------------------------------------------------------------

// Weighted mean and biased (1/W) covariance, W = sum of weights. Requires
// W >= d + 1.
inline Gaussian weighted_gaussian(const Matrix& points, std::span<const double> weights) {
  const auto d = points.rows();
  double total = 0.0;
  Vector sum = Vector::Zero(d);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double wj = weights[static_cast<std::size_t>(j)];
    if (wj == 0.0) continue;
    total += wj;
    sum.noalias() += wj * points.col(j);
  }
  if (!(total >= static_cast<double>(d + 1))) {
    throw NumericalError("Gaussian MLE needs at least d+1=" + std::to_string(d + 1) +
                         " pooled features (effective count " + std::to_string(total) + ")");
  }
  const Vector mean = sum / total;
  Matrix scatter = Matrix::Zero(d, d);
  Vector c(d);
  for (Eigen::Index j = 0; j < points.cols(); ++j) {
    const double wj = weights[static_cast<std::size_t>(j)];
    if (wj == 0.0) continue;
    c.noalias() = points.col(j) - mean;
    scatter.selfadjointView<Eigen::Lower>().rankUpdate(c, wj);
  }
  scatter.triangularView<Eigen::StrictlyUpper>() = scatter.transpose();
  return Gaussian(mean, scatter / total);
}

inline Gaussian mle_gaussian(const PooledFeatures& pooled) {
  const std::vector<double> ones(pooled.size(), 1.0);
  return weighted_gaussian(pooled.points, ones);
}

// Points are the columns of `points` (d x n).
inline Gaussian mle_gaussian(const Matrix& points) { return mle_gaussian(PooledFeatures::from_points(points)); }

// ---------------------------------------------------------------------------
// Gaussian-mixture feature MLE (EM on weighted points)
// ---------------------------------------------------------------------------

struct GmmFit {
  GaussianMixture mixture;
  std::vector<double> trace;  // weighted log-likelihood after each step, starting at the initial mixture
};

namespace detail {

// Fills resp (n x J) and returns the weighted log-likelihood.
inline double gmm_e_step(const Matrix& pts, std::span<const double> w, const GaussianMixture& mix, Matrix& resp) {
  const auto n = pts.cols();
  const auto J = static_cast<Eigen::Index>(mix.size());
  resp.resize(n, J);
  std::vector<double> logw(mix.weights().size());
  for (std::size_t j = 0; j < logw.size(); ++j) logw[j] = std::log(mix.weights()[j]);
  Matrix lp(n, J);
  for (Eigen::Index j = 0; j < J; ++j) lp.col(j) = mix.components()[static_cast<std::size_t>(j)].logpdf_cols(pts);
  std::vector<double> terms(static_cast<std::size_t>(J));
  double ll = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < J; ++j) terms[static_cast<std::size_t>(j)] = logw[static_cast<std::size_t>(j)] + lp(i, j);
    const double lse = log_sum_exp(terms);
    for (Eigen::Index j = 0; j < J; ++j) resp(i, j) = std::exp(terms[static_cast<std::size_t>(j)] - lse);
    if (w[static_cast<std::size_t>(i)] != 0.0) ll += w[static_cast<std::size_t>(i)] * lse;
  }
  return ll;
}

// M-step; a component whose effective weight drops below d+1 (or whose
// covariance is not positive definite) keeps its previous parameters.
inline GaussianMixture gmm_m_step(const Matrix& pts, std::span<const double> w, const Matrix& resp,
                                  const std::vector<Gaussian>* previous) {
  const auto J = resp.cols();
  const auto d = pts.rows();
  std::vector<double> mass(static_cast<std::size_t>(J), 0.0);
  std::vector<Gaussian> comps;
  comps.reserve(static_cast<std::size_t>(J));
  double total = 0.0;
  for (Eigen::Index j = 0; j < J; ++j) {
    std::vector<double> wj(static_cast<std::size_t>(pts.cols()));
    for (Eigen::Index i = 0; i < pts.cols(); ++i) {
      wj[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] * resp(i, j);
    }
    for (double x : wj) mass[static_cast<std::size_t>(j)] += x;
    total += mass[static_cast<std::size_t>(j)];
    bool fitted = false;
    if (mass[static_cast<std::size_t>(j)] >= static_cast<double>(d + 1)) {
      try {
        comps.push_back(weighted_gaussian(pts, wj));
        fitted = true;
      } catch (const NumericalError&) {
      }
    }
    if (!fitted) {
      if (!previous) throw NumericalError("Gaussian mixture component has insufficient support");
      comps.push_back((*previous)[static_cast<std::size_t>(j)]);
    }
  }
  if (!(total > 0.0)) throw NumericalError("Gaussian mixture: total weight is zero");
  for (double& m : mass) m /= total;
  return GaussianMixture(std::move(mass), std::move(comps));
}

}  // namespace detail

// EM for a Gaussian mixture on weighted points, started from `init`. The
// trace is non-decreasing up to the ridge added to each covariance.
inline GmmFit fit_gmm_weighted(const Matrix& points, std::span<const double> weights, GaussianMixture init,
                               int max_iters, double tol) {
  Matrix resp;
  GmmFit fit{std::move(init), {}};
  double ll = detail::gmm_e_step(points, weights, fit.mixture, resp);
  fit.trace.push_back(ll);
  for (int it = 0; it < max_iters; ++it) {
    GaussianMixture next = detail::gmm_m_step(points, weights, resp, &fit.mixture.components());
    Matrix next_resp;
    const double next_ll = detail::gmm_e_step(points, weights, next, next_resp);
    fit.mixture = std::move(next);
    resp = std::move(next_resp);
    fit.trace.push_back(next_ll);
    const double gain = next_ll - ll;
    ll = next_ll;
    if (gain < tol * std::max(1.0, std::abs(ll))) break;
  }
  return fit;
}

// Balanced random one-hot assignment of the points to J components, followed
// by one M-step.
inline GaussianMixture random_gmm_init(const Matrix& points, std::span<const double> weights, int J, Rng& rng) {
  const auto n = points.cols();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::shuffle(order.begin(), order.end(), rng);
  Matrix resp = Matrix::Zero(n, J);
  for (std::size_t k = 0; k < order.size(); ++k) resp(order[k], static_cast<Eigen::Index>(k % static_cast<std::size_t>(J))) = 1.0;
  return detail::gmm_m_step(points, weights, resp, nullptr);
}

// Drops zero-weight columns; EM on the rest is unchanged by them.
inline void support_of(const Matrix& points, std::span<const double> weights, Matrix& pts, std::vector<double>& w) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index j = 0; j < points.cols(); ++j)
    if (weights[static_cast<std::size_t>(j)] > 0.0) keep.push_back(j);
  pts.resize(points.rows(), static_cast<Eigen::Index>(keep.size()));
  w.resize(keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i) {
    pts.col(static_cast<Eigen::Index>(i)) = points.col(keep[i]);
    w[i] = weights[static_cast<std::size_t>(keep[i])];
  }
}

// Best of `restarts` weighted EM runs from random inits (by final
// log-likelihood; ties to the earliest).
inline GmmFit weighted_gmm_fit(const Matrix& points, std::span<const double> weights, int J, int inner_iters,
                               double inner_tol, int restarts, std::uint64_t seed) {
  if (J < 1) throw DataError("Gaussian mixture needs J >= 1");
  if (restarts < 1) throw DataError("Gaussian mixture needs restarts >= 1");
  Matrix pts;
  std::vector<double> w;
  support_of(points, weights, pts, w);
  const auto d = points.rows();
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  if (!(total >= static_cast<double>(J * (d + 1)))) {
    throw NumericalError("Gaussian mixture MLE needs at least J*(d+1)=" + std::to_string(J * (d + 1)) +
                         " pooled features (effective count " + std::to_string(total) + ")");
  }
  std::vector<std::optional<GmmFit>> fits(static_cast<std::size_t>(restarts));
  parallel_for(fits.size(), [&](std::size_t r) {
    Rng rng(derive_seed(derive_seed(seed, streams::kGmmInit), r));
    fits[r] = fit_gmm_weighted(pts, w, random_gmm_init(pts, w, J, rng), inner_iters, inner_tol);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < fits.size(); ++r) {
    if (fits[r]->trace.back() > fits[best]->trace.back()) best = r;
  }
  return std::move(*fits[best]);
}

inline GmmFit mle_gmm_fit(const PooledFeatures& pooled, int J, int inner_iters, double inner_tol, int restarts,
                          std::uint64_t seed) {
  const std::vector<double> ones(pooled.size(), 1.0);
  return weighted_gmm_fit(pooled.points, ones, J, inner_iters, inner_tol, restarts, seed);
}

inline GaussianMixture mle_gmm(const Matrix& points, int J, int inner_iters = 100, double inner_tol = 1e-8,
                               int restarts = 5, std::uint64_t seed = 0) {
  return mle_gmm_fit(PooledFeatures::from_points(points), J, inner_iters, inner_tol, restarts, seed).mixture;
}

// ---------------------------------------------------------------------------
// IID-cluster fit: cardinality MLE on {|X_n|}, feature MLE on the pool.
// ---------------------------------------------------------------------------

inline CardinalityDist fit_cardinality(std::span<const std::size_t> cards, std::span<const double> weights,
                                       const CardFamily& family) {
  if (const auto* cat = std::get_if<CategoricalFamily>(&family)) {
    std::size_t max_obs = 0;
    for (auto c : cards) max_obs = std::max(max_obs, c);
    const std::size_t M = cat->max_card.value_or(default_max_cardinality(max_obs));
    return weighted_categorical_card(cards, weights, M, cat->laplace);
  }
  return weighted_poisson_rate(cards, weights);
}

inline FeatureDensity fit_features(const PooledFeatures& pooled, const FeatFamily& family, std::uint64_t seed) {
  if (std::holds_alternative<GaussianFamily>(family)) return mle_gaussian(pooled);
  const auto& g = std::get<GmmFamily>(family);
  return mle_gmm_fit(pooled, g.components, g.inner_iters, g.inner_tol, g.restarts, seed).mixture;
}

inline PointProcessModel fit_iid_cluster(std::span<const PointPattern> data, const FitOptions& opts) {
  if (data.empty()) throw DataError("cannot fit a point-process model to an empty dataset");
  const int d = data.front().dim();
  const auto pooled = PooledFeatures::from(data, d);
  const auto cards = cardinalities(data);
  const std::vector<double> ones(cards.size(), 1.0);
  return PointProcessModel(fit_cardinality(cards, ones, opts.card), fit_features(pooled, opts.feat, opts.seed),
                           opts.unit_u);
}

}  // namespace setproc

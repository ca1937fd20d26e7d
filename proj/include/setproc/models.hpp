#pragma once

#include <Eigen/Cholesky>

#include <cmath>
#include <numbers>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "setproc/core.hpp"
#include "setproc/numeric.hpp"
#include "setproc/random.hpp"

namespace setproc {

// ---------------------------------------------------------------------------
// Cardinality distributions
// ---------------------------------------------------------------------------

// Probability mass over {0, ..., M}; probs[m] = Pr(|X| = m).
class Categorical {
 public:
  explicit Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
    if (probs_.empty()) throw DataError("categorical cardinality needs at least one mass value");
    double total = 0.0;
    for (double p : probs_) {
      if (!(p >= 0.0) || !std::isfinite(p)) throw DataError("categorical cardinality masses must be finite and >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) throw DataError("categorical cardinality masses must sum to 1");
  }

  // Normalizes nonnegative weights.
  static Categorical from_weights(std::vector<double> w) {
    double total = 0.0;
    for (double x : w) total += x;
    if (!(total > 0.0)) throw DataError("categorical weights must have positive total");
    for (double& x : w) x /= total;
    return Categorical(std::move(w));
  }

  std::size_t max_cardinality() const { return probs_.size() - 1; }
  const std::vector<double>& probs() const { return probs_; }

 private:
  std::vector<double> probs_;
};

class PoissonCard {
 public:
  explicit PoissonCard(double rate) : rate_(rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) throw DataError("Poisson cardinality rate must be finite and > 0");
  }
  double rate() const { return rate_; }

 private:
  double rate_;
};

using CardinalityDist = std::variant<Categorical, PoissonCard>;

inline double card_logpmf(const CardinalityDist& c, std::size_t n) {
  if (const auto* cat = std::get_if<Categorical>(&c)) {
    if (n > cat->max_cardinality()) return kNegInf;
    return std::log(cat->probs()[n]);
  }
  const double rho = std::get<PoissonCard>(c).rate();
  return static_cast<double>(n) * std::log(rho) - rho - log_factorial(n);
}

inline std::size_t sample_cardinality(const CardinalityDist& c, Rng& rng) {
  if (const auto* cat = std::get_if<Categorical>(&c)) {
    std::discrete_distribution<std::size_t> dist(cat->probs().begin(), cat->probs().end());
    return dist(rng);
  }
  std::poisson_distribution<long long> dist(std::get<PoissonCard>(c).rate());
  return static_cast<std::size_t>(dist(rng));
}

// ---------------------------------------------------------------------------
// Feature densities
// ---------------------------------------------------------------------------

// Ridge added to a covariance before factorization: 1e-9 * trace / d.
inline double covariance_ridge(const Matrix& cov) { return 1e-9 * cov.trace() / static_cast<double>(cov.rows()); }

class Gaussian {
 public:
  Gaussian(Vector mean, Matrix cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    const auto d = mean_.size();
    if (d < 1) throw DataError("Gaussian mean must have dimension >= 1");
    if (cov_.rows() != d || cov_.cols() != d) throw DataError("Gaussian covariance shape does not match mean");
    if (!mean_.allFinite() || !cov_.allFinite()) throw DataError("Gaussian parameters must be finite");
    const double scale = cov_.cwiseAbs().maxCoeff();
    if ((cov_ - cov_.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(scale, 1e-300)) {
      throw DataError("Gaussian covariance must be symmetric");
    }
    Matrix reg = 0.5 * (cov_ + cov_.transpose());
    reg.diagonal().array() += covariance_ridge(cov_);
    chol_.compute(reg);
    if (chol_.info() != Eigen::Success) throw NumericalError("Gaussian covariance is not positive definite");
    log_det_ = 2.0 * chol_.matrixLLT().diagonal().array().log().sum();
    if (!std::isfinite(log_det_)) throw NumericalError("Gaussian covariance is singular");
  }

  int dim() const { return static_cast<int>(mean_.size()); }
  const Vector& mean() const { return mean_; }
  const Matrix& cov() const { return cov_; }
  // The covariance actually used for evaluation (symmetrized, ridge added).
  Matrix effective_cov() const { return chol_.reconstructedMatrix(); }
  double log_det() const { return log_det_; }
  const Eigen::LLT<Matrix>& cholesky() const { return chol_; }

  double logpdf(const Eigen::Ref<const Vector>& x) const {
    const Vector z = chol_.matrixL().solve(x - mean_);
    return -0.5 * (dim() * std::log(2.0 * std::numbers::pi) + log_det_ + z.squaredNorm());
  }

  // logpdf of every column of pts, with one triangular solve for the batch.
  Vector logpdf_cols(const Matrix& pts) const {
    const Matrix z = chol_.matrixL().solve(pts.colwise() - mean_);
    return (-0.5 * (dim() * std::log(2.0 * std::numbers::pi) + log_det_)) - 0.5 * z.colwise().squaredNorm().transpose().array();
  }

  Vector sample(Rng& rng) const {
    std::normal_distribution<double> n01(0.0, 1.0);
    Vector z(dim());
    for (int i = 0; i < dim(); ++i) z(i) = n01(rng);
    return mean_ + chol_.matrixL() * z;
  }

 private:
  Vector mean_;
  Matrix cov_;
  Eigen::LLT<Matrix> chol_;
  double log_det_ = 0.0;
};

class GaussianMixture {
 public:
  GaussianMixture(std::vector<double> weights, std::vector<Gaussian> components)
      : weights_(std::move(weights)), components_(std::move(components)) {
    if (components_.empty()) throw DataError("Gaussian mixture needs at least one component");
    if (weights_.size() != components_.size()) throw DataError("Gaussian mixture weight count mismatch");
    double total = 0.0;
    for (double w : weights_) {
      if (!(w >= 0.0) || !std::isfinite(w)) throw DataError("Gaussian mixture weights must be finite and >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-10) throw DataError("Gaussian mixture weights must sum to 1");
    for (const auto& g : components_) {
      if (g.dim() != components_.front().dim()) throw DataError("Gaussian mixture components differ in dimension");
    }
    log_weights_.reserve(weights_.size());
    for (double w : weights_) log_weights_.push_back(std::log(w));
  }

  int dim() const { return components_.front().dim(); }
  std::size_t size() const { return components_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Gaussian>& components() const { return components_; }

  double logpdf(const Eigen::Ref<const Vector>& x) const {
    std::vector<double> terms(components_.size());
    for (std::size_t j = 0; j < components_.size(); ++j) terms[j] = log_weights_[j] + components_[j].logpdf(x);
    return log_sum_exp(terms);
  }

  Vector sample(Rng& rng) const {
    std::discrete_distribution<std::size_t> pick(weights_.begin(), weights_.end());
    return components_[pick(rng)].sample(rng);
  }

 private:
  std::vector<double> weights_;
  std::vector<Gaussian> components_;
  std::vector<double> log_weights_;
};

// Uniform density on the closed box [lower, upper]. Only used as a fixture
// family; it is never fitted.
class UniformBox {
 public:
  UniformBox(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
    if (lower_.size() < 1 || lower_.size() != upper_.size()) throw DataError("uniform box bounds shape mismatch");
    if (!lower_.allFinite() || !upper_.allFinite()) throw DataError("uniform box bounds must be finite");
    if (!(lower_.array() < upper_.array()).all()) throw DataError("uniform box needs lower < upper componentwise");
    log_volume_ = (upper_ - lower_).array().log().sum();
  }

  int dim() const { return static_cast<int>(lower_.size()); }
  const Vector& lower() const { return lower_; }
  const Vector& upper() const { return upper_; }
  double log_volume() const { return log_volume_; }

  bool contains(const Eigen::Ref<const Vector>& x) const {
    return (x.array() >= lower_.array()).all() && (x.array() <= upper_.array()).all();
  }

  double logpdf(const Eigen::Ref<const Vector>& x) const { return contains(x) ? -log_volume_ : kNegInf; }

  Vector sample(Rng& rng) const {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    Vector x(dim());
    for (int i = 0; i < dim(); ++i) x(i) = lower_(i) + u(rng) * (upper_(i) - lower_(i));
    return x;
  }

 private:
  Vector lower_;
  Vector upper_;
  double log_volume_ = 0.0;
};

using FeatureDensity = std::variant<Gaussian, GaussianMixture, UniformBox>;

inline int feature_dim(const FeatureDensity& f) {
  return std::visit([](const auto& g) { return g.dim(); }, f);
}

inline double feat_logpdf(const FeatureDensity& f, const Eigen::Ref<const Vector>& x) {
  check_dim(x, feature_dim(f));
  return std::visit([&](const auto& g) { return g.logpdf(x); }, f);
}

inline Vector sample_feature(const FeatureDensity& f, Rng& rng) {
  return std::visit([&](const auto& g) { return g.sample(rng); }, f);
}

// Sum of log p_f over the points of x (no dimension check).
inline double sum_feat_logpdf(const FeatureDensity& f, const PointPattern& x) {
  return std::visit(
      [&](const auto& g) {
        double s = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) s += g.logpdf(x.point(i));
        return s;
      },
      f);
}

namespace detail {

// log N(delta; 0, S) for a symmetric positive definite S.
inline double log_gauss_at(const Vector& delta, const Matrix& s) {
  Eigen::LLT<Matrix> llt(s);
  if (llt.info() != Eigen::Success) throw NumericalError("covariance sum is not positive definite");
  const double log_det = 2.0 * llt.matrixLLT().diagonal().array().log().sum();
  const Vector z = llt.matrixL().solve(delta);
  return -0.5 * (delta.size() * std::log(2.0 * std::numbers::pi) + log_det + z.squaredNorm());
}

}  // namespace detail

// log of the L2 energy, log of the integral of p_f(x)^2 dx.
inline double log_l2_energy(const FeatureDensity& f) {
  if (const auto* g = std::get_if<Gaussian>(&f)) {
    return -0.5 * g->dim() * std::log(4.0 * std::numbers::pi) - 0.5 * g->log_det();
  }
  if (const auto* box = std::get_if<UniformBox>(&f)) return -box->log_volume();
  const auto& mix = std::get<GaussianMixture>(f);
  const auto& comps = mix.components();
  std::vector<Matrix> covs;
  covs.reserve(comps.size());
  for (const auto& c : comps) covs.push_back(c.effective_cov());
  std::vector<double> terms;
  terms.reserve(comps.size() * comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    for (std::size_t j = 0; j < comps.size(); ++j) {
      const double w = mix.weights()[i] * mix.weights()[j];
      if (w == 0.0) continue;
      terms.push_back(std::log(w) +
                      detail::log_gauss_at(comps[i].mean() - comps[j].mean(), covs[i] + covs[j]));
    }
  }
  return log_sum_exp(terms);
}

inline double l2_energy(const FeatureDensity& f) { return std::exp(log_l2_energy(f)); }

// ---------------------------------------------------------------------------
// Point-process model (IID-cluster; Poisson when the cardinality is Poisson)
// ---------------------------------------------------------------------------

class PointProcessModel {
 public:
  PointProcessModel(CardinalityDist card, FeatureDensity feat, double unit_u = 1.0)
      : card_(std::move(card)), feat_(std::move(feat)), unit_u_(unit_u) {
    if (!(unit_u > 0.0) || !std::isfinite(unit_u)) throw DataError("unit hyper-volume U must be finite and > 0");
  }

  const CardinalityDist& card() const { return card_; }
  const FeatureDensity& feat() const { return feat_; }
  double unit_u() const { return unit_u_; }
  int dim() const { return feature_dim(feat_); }
  bool is_poisson() const { return std::holds_alternative<PoissonCard>(card_); }

 private:
  CardinalityDist card_;
  FeatureDensity feat_;
  double unit_u_;
};

// log f(X) = log p_c(|X|) + log |X|! + |X| log U + sum log p_f(x).
// For a Poisson cardinality this is |X| log rho - rho + |X| log U + sum log p_f.
inline double log_density(const PointProcessModel& m, const PointPattern& x) {
  check_dim(x, m.dim());
  const std::size_t n = x.size();
  const double lc = card_logpmf(m.card(), n);
  if (lc == kNegInf) return kNegInf;
  return lc + log_factorial(n) + static_cast<double>(n) * std::log(m.unit_u()) + sum_feat_logpdf(m.feat(), x);
}

// Naive-Bayes bag likelihood: sum of log p_f over the points; 0 for an empty
// pattern. Carries units of length^(-|X| d).
inline double nb_log_likelihood(const FeatureDensity& f, const PointPattern& x) {
  check_dim(x, feature_dim(f));
  return sum_feat_logpdf(f, x);
}

inline PointPattern sample(const PointProcessModel& m, Rng& rng) {
  const std::size_t n = sample_cardinality(m.card(), rng);
  Matrix pts(m.dim(), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) pts.col(static_cast<Eigen::Index>(i)) = sample_feature(m.feat(), rng);
  return PointPattern(std::move(pts));
}

// Intensity rho * p_f(x) of a Poisson point process.
inline double intensity(const PointProcessModel& m, const Eigen::Ref<const Vector>& x) {
  const auto* pois = std::get_if<PoissonCard>(&m.card());
  if (!pois) throw UnsupportedOperation("intensity is only defined for Poisson cardinality");
  return pois->rate() * std::exp(feat_logpdf(m.feat(), x));
}

}  // namespace setproc

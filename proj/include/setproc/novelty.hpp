#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "setproc/models.hpp"
#include "setproc/parallel.hpp"

namespace setproc {

// Score used to rank patterns against the 'normal' model.
//   kRanking    log p_c(|X|) + sum_x [log p_f(x) - log ||p_f||^2]  (unit-free)
//   kDensity    the point-process log density
//   kNaiveBayes sum_x log p_f(x)
enum class RankMode { kRanking, kDensity, kNaiveBayes };

enum class Decision { kNormal, kNovel };

class NoveltyDetector {
 public:
  explicit NoveltyDetector(PointProcessModel model, RankMode mode = RankMode::kRanking)
      : model_(std::move(model)), log_energy_(log_l2_energy(model_.feat())), mode_(mode) {}

  const PointProcessModel& model() const { return model_; }
  double log_energy() const { return log_energy_; }
  double energy() const { return std::exp(log_energy_); }
  RankMode mode() const { return mode_; }
  void set_mode(RankMode mode) { mode_ = mode; }

  const std::optional<double>& threshold() const { return threshold_; }
  void set_threshold(double tau) { threshold_ = tau; }

 private:
  PointProcessModel model_;
  double log_energy_;
  RankMode mode_;
  std::optional<double> threshold_;
};

inline double log_rank(const NoveltyDetector& d, const PointPattern& x) {
  const auto& m = d.model();
  switch (d.mode()) {
    case RankMode::kDensity:
      return log_density(m, x);
    case RankMode::kNaiveBayes:
      return nb_log_likelihood(m.feat(), x);
    case RankMode::kRanking:
      break;
  }
  check_dim(x, m.dim());
  const double lc = card_logpmf(m.card(), x.size());
  if (lc == kNegInf) return kNegInf;
  return lc + sum_feat_logpdf(m.feat(), x) - static_cast<double>(x.size()) * d.log_energy();
}

inline std::vector<double> log_rank_batch(const NoveltyDetector& d, std::span<const PointPattern> xs) {
  std::vector<double> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = log_rank(d, xs[i]); });
  return out;
}

// Lower (inverted-CDF) empirical quantile: the ceil(q N)-th smallest value.
inline double lower_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty set");
  if (!(q > 0.0 && q < 1.0)) throw DataError("quantile level must lie in (0, 1)");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  auto idx = static_cast<std::size_t>(std::ceil(q * n));
  idx = std::clamp<std::size_t>(idx, 1, values.size()) - 1;
  return values[idx];
}

// Sets and returns the threshold: the q-quantile of the training ranks.
inline double fit_threshold(NoveltyDetector& d, std::span<const PointPattern> train, double q = 0.2) {
  if (train.empty()) throw DataError("novelty threshold needs at least one training pattern");
  const double tau = lower_quantile(log_rank_batch(d, train), q);
  d.set_threshold(tau);
  return tau;
}

// Novel iff the rank falls strictly below the threshold.
inline Decision decide(double rank, double tau) { return rank < tau ? Decision::kNovel : Decision::kNormal; }

inline Decision detect(const NoveltyDetector& d, const PointPattern& x) {
  if (!d.threshold()) throw DataError("novelty detector has no fitted threshold");
  return decide(log_rank(d, x), *d.threshold());
}

// Harmonic mean of precision and recall, with F1(0, 0) = 0.
inline double f1(double precision, double recall) {
  const double s = precision + recall;
  return s > 0.0 ? 2.0 * precision * recall / s : 0.0;
}

}  // namespace setproc

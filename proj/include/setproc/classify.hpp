#pragma once

#include <span>
#include <string>
#include <vector>

#include "setproc/learn.hpp"
#include "setproc/models.hpp"
#include "setproc/numeric.hpp"
#include "setproc/parallel.hpp"

namespace setproc {

enum class PriorMode { kUniform, kEmpirical };

// Which class-conditional likelihood the classifier uses: the full
// point-process density, or the naive-Bayes product of feature densities.
enum class LikelihoodMode { kPointProcess, kNaiveBayes };

struct Posterior {
  std::vector<double> probs;
  bool degenerate = false;  // every class likelihood was -inf; probs is uniform
};

class Classifier {
 public:
  Classifier(std::vector<double> prior, std::vector<PointProcessModel> models, LikelihoodMode mode)
      : prior_(std::move(prior)), models_(std::move(models)), mode_(mode) {
    if (models_.empty()) throw DataError("classifier needs at least one class");
    if (prior_.size() != models_.size()) throw DataError("classifier prior size does not match class count");
    double total = 0.0;
    for (double p : prior_) {
      if (!(p >= 0.0)) throw DataError("class prior must be nonnegative");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-10) throw DataError("class prior must sum to 1");
    for (const auto& m : models_) {
      if (m.dim() != models_.front().dim()) throw DataError("class models differ in dimension");
    }
  }

  std::size_t num_classes() const { return models_.size(); }
  int dim() const { return models_.front().dim(); }
  const std::vector<double>& prior() const { return prior_; }
  const std::vector<PointProcessModel>& models() const { return models_; }
  LikelihoodMode mode() const { return mode_; }

  double class_loglik(std::size_t k, const PointPattern& x) const {
    return mode_ == LikelihoodMode::kPointProcess ? log_density(models_[k], x)
                                                  : nb_log_likelihood(models_[k].feat(), x);
  }

 private:
  std::vector<double> prior_;
  std::vector<PointProcessModel> models_;
  LikelihoodMode mode_;
};

inline std::vector<double> empirical_prior(std::span<const int> labels, std::size_t K) {
  std::vector<double> p(K, 0.0);
  for (int y : labels) p[static_cast<std::size_t>(y)] += 1.0;
  for (double& v : p) v /= static_cast<double>(labels.size());
  return p;
}

// One model per class, each fitted to that class's patterns. K is the
// largest label + 1 and every class in 0..K-1 must have a pattern.
inline Classifier train_classifier(std::span<const LabeledPattern> data, const FitOptions& opts,
                                   PriorMode prior_mode = PriorMode::kUniform,
                                   LikelihoodMode mode = LikelihoodMode::kPointProcess) {
  if (data.empty()) throw DataError("cannot train a classifier on an empty dataset");
  int max_label = 0;
  for (const auto& lp : data) {
    if (lp.label < 0) throw DataError("labels must be non-negative");
    max_label = std::max(max_label, lp.label);
  }
  const auto K = static_cast<std::size_t>(max_label) + 1;
  std::vector<std::vector<PointPattern>> by_class(K);
  std::vector<int> labels;
  labels.reserve(data.size());
  for (const auto& lp : data) {
    by_class[static_cast<std::size_t>(lp.label)].push_back(lp.pattern);
    labels.push_back(lp.label);
  }
  for (std::size_t k = 0; k < K; ++k) {
    if (by_class[k].empty()) throw DataError("class " + std::to_string(k) + " has no training patterns");
  }
  std::vector<std::optional<PointProcessModel>> fitted(K);
  parallel_for(K, [&](std::size_t k) {
    FitOptions per_class = opts;
    per_class.seed = derive_seed(opts.seed, k);
    fitted[k] = fit_iid_cluster(by_class[k], per_class);
  });
  std::vector<PointProcessModel> models;
  models.reserve(K);
  for (auto& m : fitted) models.push_back(std::move(*m));
  std::vector<double> prior =
      prior_mode == PriorMode::kEmpirical ? empirical_prior(labels, K) : std::vector<double>(K, 1.0 / static_cast<double>(K));
  return Classifier(std::move(prior), std::move(models), mode);
}

inline Posterior posterior(const Classifier& c, const PointPattern& x) {
  check_dim(x, c.dim());
  std::vector<double> logp(c.num_classes());
  for (std::size_t k = 0; k < logp.size(); ++k) {
    logp[k] = c.prior()[k] > 0.0 ? std::log(c.prior()[k]) + c.class_loglik(k, x) : kNegInf;
  }
  Posterior out;
  bool ok = true;
  out.probs = softmax(logp, &ok);
  out.degenerate = !ok;
  return out;
}

// Posterior mode; ties go to the smallest label.
inline int predict(const Posterior& p) { return static_cast<int>(argmax(p.probs)); }

inline int predict(const Classifier& c, const PointPattern& x) { return predict(posterior(c, x)); }

inline std::vector<Posterior> posterior_batch(const Classifier& c, std::span<const PointPattern> xs) {
  std::vector<Posterior> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t i) { out[i] = posterior(c, xs[i]); });
  return out;
}

}  // namespace setproc

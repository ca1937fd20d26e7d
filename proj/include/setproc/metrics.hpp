#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "setproc/error.hpp"
#include "setproc/novelty.hpp"

namespace setproc {

// Contingency table between two labelings; rows index the distinct truth
// labels (sorted), columns the distinct predicted labels.
class ConfusionMatrix {
 public:
  ConfusionMatrix(std::span<const int> truth, std::span<const int> pred) {
    if (truth.size() != pred.size()) throw DataError("truth and prediction lengths differ");
    std::map<int, std::size_t> rows, cols;
    for (int t : truth) rows.emplace(t, 0);
    for (int p : pred) cols.emplace(p, 0);
    std::size_t i = 0;
    for (auto& [label, idx] : rows) {
      idx = i++;
      row_labels_.push_back(label);
    }
    i = 0;
    for (auto& [label, idx] : cols) {
      idx = i++;
      col_labels_.push_back(label);
    }
    counts_.assign(rows.size(), std::vector<std::int64_t>(cols.size(), 0));
    for (std::size_t n = 0; n < truth.size(); ++n) ++counts_[rows.at(truth[n])][cols.at(pred[n])];
    total_ = static_cast<std::int64_t>(truth.size());
  }

  std::size_t rows() const { return counts_.size(); }
  std::size_t cols() const { return rows() ? counts_.front().size() : 0; }
  std::int64_t operator()(std::size_t r, std::size_t c) const { return counts_[r][c]; }
  std::int64_t total() const { return total_; }
  const std::vector<int>& row_labels() const { return row_labels_; }
  const std::vector<int>& col_labels() const { return col_labels_; }

 private:
  std::vector<std::vector<std::int64_t>> counts_;
  std::vector<int> row_labels_, col_labels_;
  std::int64_t total_ = 0;
};

inline double accuracy(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) throw DataError("truth and prediction lengths differ");
  if (truth.empty()) throw DataError("accuracy of an empty labeling");
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == pred[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

struct DetectionScores {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

// `true` marks a novelty, in both the ground truth and the detector output.
inline DetectionScores detection_prf(const std::vector<bool>& truth, const std::vector<bool>& pred) {
  if (truth.size() != pred.size()) throw DataError("truth and prediction lengths differ");
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (pred[i] && truth[i]) ++tp;
    else if (pred[i]) ++fp;
    else if (truth[i]) ++fn;
  }
  DetectionScores s;
  s.precision = tp + fp > 0 ? tp / (tp + fp) : 0.0;
  s.recall = tp + fn > 0 ? tp / (tp + fn) : 0.0;
  s.f1 = f1(s.precision, s.recall);
  return s;
}

struct ClusteringScores {
  double purity = 0.0;
  double nmi = 0.0;
  double rand = 0.0;
  double pair_f1 = 0.0;
};

// Purity, NMI (geometric-mean normalization), Rand index and pair-counting
// F1, all invariant to how either labeling names its clusters.
inline ClusteringScores clustering_scores(std::span<const int> truth, std::span<const int> pred) {
  if (truth.size() != pred.size()) throw DataError("truth and prediction lengths differ");
  if (truth.size() < 2) throw DataError("clustering scores need at least 2 items");
  const ConfusionMatrix cm(truth, pred);
  const double N = static_cast<double>(cm.total());
  std::vector<double> row_sum(cm.rows(), 0.0), col_sum(cm.cols(), 0.0);
  for (std::size_t r = 0; r < cm.rows(); ++r)
    for (std::size_t c = 0; c < cm.cols(); ++c) {
      row_sum[r] += static_cast<double>(cm(r, c));
      col_sum[c] += static_cast<double>(cm(r, c));
    }

  ClusteringScores s;
  double purity = 0.0;
  for (std::size_t c = 0; c < cm.cols(); ++c) {
    std::int64_t best = 0;
    for (std::size_t r = 0; r < cm.rows(); ++r) best = std::max(best, cm(r, c));
    purity += static_cast<double>(best);
  }
  s.purity = purity / N;

  auto entropy = [N](const std::vector<double>& sums) {
    double h = 0.0;
    for (double v : sums)
      if (v > 0) h -= (v / N) * std::log(v / N);
    return h;
  };
  const double h_truth = entropy(row_sum);
  const double h_pred = entropy(col_sum);
  double mi = 0.0;
  for (std::size_t r = 0; r < cm.rows(); ++r)
    for (std::size_t c = 0; c < cm.cols(); ++c) {
      const double n = static_cast<double>(cm(r, c));
      if (n > 0) mi += (n / N) * std::log(n * N / (row_sum[r] * col_sum[c]));
    }
  // A one-to-one table means the partitions agree up to naming; NMI is then
  // exactly 1, which the floating-point quotient can miss by an ulp.
  bool bijective = cm.rows() == cm.cols();
  for (std::size_t r = 0; r < cm.rows() && bijective; ++r) {
    std::size_t nonzero = 0;
    for (std::size_t c = 0; c < cm.cols(); ++c) nonzero += cm(r, c) > 0;
    bijective = nonzero == 1;
  }
  if (bijective) s.nmi = 1.0;
  else if (h_truth <= 0.0 || h_pred <= 0.0) s.nmi = 0.0;
  else s.nmi = std::clamp(mi / std::sqrt(h_truth * h_pred), 0.0, 1.0);

  // Pair counts from the contingency table.
  auto choose2 = [](double v) { return v * (v - 1.0) / 2.0; };
  double same_both = 0.0;
  for (std::size_t r = 0; r < cm.rows(); ++r)
    for (std::size_t c = 0; c < cm.cols(); ++c) same_both += choose2(static_cast<double>(cm(r, c)));
  double same_truth = 0.0, same_pred = 0.0;
  for (double v : row_sum) same_truth += choose2(v);
  for (double v : col_sum) same_pred += choose2(v);
  const double pairs = choose2(N);
  const double diff_both = pairs - same_truth - same_pred + same_both;
  s.rand = (same_both + diff_both) / pairs;
  if (same_pred == 0.0 && same_truth == 0.0) {
    s.pair_f1 = 1.0;  // both all-singleton: the partitions agree on every pair
  } else {
    const double precision = same_pred > 0 ? same_both / same_pred : 0.0;
    const double recall = same_truth > 0 ? same_both / same_truth : 0.0;
    s.pair_f1 = f1(precision, recall);
  }
  return s;
}

}  // namespace setproc

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "setproc/error.hpp"

namespace setproc {

using Point = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// A finite multiset of d-dimensional points. Stored column-wise (d x n); the
// column order carries no meaning and every downstream operation treats two
// patterns with permuted columns as the same pattern.
class PointPattern {
 public:
  explicit PointPattern(int dim = 1) : points_(dim, 0) {
    if (dim < 1) throw DataError("point pattern dimension must be >= 1");
  }

  explicit PointPattern(Matrix points) : points_(std::move(points)) {
    if (points_.rows() < 1) throw DataError("point pattern dimension must be >= 1");
    if (!points_.allFinite()) throw DataError("point pattern contains non-finite coordinates");
  }

  PointPattern(int dim, std::span<const Point> points) : points_(dim, static_cast<Eigen::Index>(points.size())) {
    if (dim < 1) throw DataError("point pattern dimension must be >= 1");
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].size() != dim) throw DataError("point dimension does not match pattern dimension");
      points_.col(static_cast<Eigen::Index>(i)) = points[i];
    }
    if (!points_.allFinite()) throw DataError("point pattern contains non-finite coordinates");
  }

  // 1-D convenience: each scalar becomes one point.
  static PointPattern scalars(std::initializer_list<double> xs) {
    Matrix m(1, static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) m(0, i++) = x;
    return PointPattern(std::move(m));
  }

  int dim() const { return static_cast<int>(points_.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  bool empty() const { return points_.cols() == 0; }

  auto point(std::size_t i) const { return points_.col(static_cast<Eigen::Index>(i)); }
  const Matrix& matrix() const { return points_; }

 private:
  Matrix points_;
};

struct LabeledPattern {
  PointPattern pattern;
  int label = 0;
};

inline std::size_t cardinality(const PointPattern& x) { return x.size(); }

inline void check_dim(const PointPattern& x, int dim) {
  if (x.dim() != dim) {
    throw DataError("dimension mismatch: pattern has d=" + std::to_string(x.dim()) + ", expected d=" +
                    std::to_string(dim));
  }
}

inline void check_dim(const Eigen::Ref<const Vector>& x, int dim) {
  if (x.size() != dim) {
    throw DataError("dimension mismatch: point has d=" + std::to_string(x.size()) + ", expected d=" +
                    std::to_string(dim));
  }
}

// Multiset union; cardinality of the result is the sum of the inputs'.
inline PointPattern pool(std::span<const PointPattern> patterns) {
  if (patterns.empty()) throw DataError("pool: no patterns given");
  const int d = patterns.front().dim();
  Eigen::Index total = 0;
  for (const auto& x : patterns) {
    check_dim(x, d);
    total += static_cast<Eigen::Index>(x.size());
  }
  Matrix out(d, total);
  Eigen::Index at = 0;
  for (const auto& x : patterns) {
    out.middleCols(at, x.matrix().cols()) = x.matrix();
    at += x.matrix().cols();
  }
  return PointPattern(std::move(out));
}

// A homogeneous collection of patterns, optionally labeled. Dimension is
// fixed at construction and every pattern is validated against it.
class Dataset {
 public:
  explicit Dataset(int dim) : dim_(dim) {
    if (dim < 1) throw DataError("dataset dimension must be >= 1");
  }

  Dataset(int dim, std::vector<PointPattern> patterns, std::optional<std::vector<int>> labels = std::nullopt)
      : dim_(dim), patterns_(std::move(patterns)), labels_(std::move(labels)) {
    if (dim < 1) throw DataError("dataset dimension must be >= 1");
    for (const auto& x : patterns_) check_dim(x, dim_);
    if (labels_) {
      if (labels_->size() != patterns_.size()) throw DataError("label count does not match pattern count");
      for (int y : *labels_) {
        if (y < 0) throw DataError("labels must be non-negative");
      }
    }
  }

  void add(PointPattern x) {
    if (labels_ && !labels_->empty()) throw DataError("dataset is labeled; add a label with the pattern");
    check_dim(x, dim_);
    patterns_.push_back(std::move(x));
  }

  void add(PointPattern x, int label) {
    if (!labels_) {
      if (!patterns_.empty()) throw DataError("dataset is unlabeled; cannot add a labeled pattern");
      labels_.emplace();
    }
    if (label < 0) throw DataError("labels must be non-negative");
    check_dim(x, dim_);
    patterns_.push_back(std::move(x));
    labels_->push_back(label);
  }

  int dim() const { return dim_; }
  std::size_t size() const { return patterns_.size(); }
  bool empty() const { return patterns_.empty(); }
  bool labeled() const { return labels_.has_value(); }

  const std::vector<PointPattern>& patterns() const { return patterns_; }
  const PointPattern& operator[](std::size_t i) const { return patterns_[i]; }
  const std::vector<int>& labels() const {
    if (!labels_) throw DataError("dataset has no labels");
    return *labels_;
  }

  std::vector<LabeledPattern> labeled_patterns() const {
    const auto& y = labels();
    std::vector<LabeledPattern> out;
    out.reserve(patterns_.size());
    for (std::size_t i = 0; i < patterns_.size(); ++i) out.push_back({patterns_[i], y[i]});
    return out;
  }

 private:
  int dim_;
  std::vector<PointPattern> patterns_;
  std::optional<std::vector<int>> labels_;
};

inline std::vector<std::size_t> cardinalities(std::span<const PointPattern> patterns) {
  std::vector<std::size_t> out;
  out.reserve(patterns.size());
  for (const auto& x : patterns) out.push_back(x.size());
  return out;
}

}  // namespace setproc

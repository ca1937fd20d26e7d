#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

namespace setproc {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

inline double log_factorial(std::size_t n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// log(sum(exp(v))); -inf for an empty span or when every entry is -inf.
inline double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return kNegInf;
  const double m = *std::max_element(v.begin(), v.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

// Normalizes log-weights into probabilities with max subtraction. Returns
// false (and fills a uniform vector) when no entry is finite.
inline bool softmax(std::span<const double> logw, std::span<double> out) {
  const double lse = log_sum_exp(logw);
  if (!std::isfinite(lse)) {
    std::fill(out.begin(), out.end(), 1.0 / static_cast<double>(out.size()));
    return false;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < logw.size(); ++i) {
    out[i] = std::exp(logw[i] - lse);
    total += out[i];
  }
  for (double& p : out) p /= total;
  return true;
}

inline std::vector<double> softmax(std::span<const double> logw, bool* ok = nullptr) {
  std::vector<double> out(logw.size());
  const bool good = softmax(logw, std::span<double>(out));
  if (ok) *ok = good;
  return out;
}

// Index of the maximum; ties resolve to the smallest index.
inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

// log of the multivariate gamma function Gamma_d(a).
inline double log_multigamma(double a, int d) {
  double r = 0.25 * d * (d - 1) * std::log(std::numbers::pi);
  for (int j = 1; j <= d; ++j) r += std::lgamma(a + 0.5 * (1 - j));
  return r;
}

}  // namespace setproc

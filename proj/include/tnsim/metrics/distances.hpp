#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>

namespace tnsim::metrics {

/// Nonnegative bin weights; `normalized` implies the bins sum to 1 (+-1e-9).
struct Histogram {
  Eigen::VectorXd bins;
  bool normalized = false;

  static Histogram from_counts(const Eigen::Ref<const Eigen::VectorXd>& counts);
  static Histogram uniform(Eigen::Index n);
  double total() const { return bins.sum(); }
};

/// 1-D earth mover's distance with ground distance `bin_width` between
/// adjacent bins: bin_width * sum_k |CDF_p(k) - CDF_q(k)|.
template <typename DerivedP, typename DerivedQ>
double emd_1d(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q,
              double bin_width = 1.0) {
  if (p.size() != q.size()) throw std::invalid_argument("emd_1d: bin count mismatch");
  double cdf_gap = 0;
  double total = 0;
  for (Eigen::Index k = 0; k + 1 < p.size(); ++k) {
    cdf_gap += static_cast<double>(p(k)) - static_cast<double>(q(k));
    total += std::abs(cdf_gap);
  }
  return bin_width * total;
}

inline double emd_1d(const Histogram& p, const Histogram& q, double bin_width = 1.0) {
  if (!p.normalized || !q.normalized) throw std::invalid_argument("emd_1d: histograms must be normalized");
  return emd_1d(p.bins, q.bins, bin_width);
}

/// Base-2 Jensen-Shannon divergence, in [0, 1].
template <typename DerivedP, typename DerivedQ>
double jsd(const Eigen::MatrixBase<DerivedP>& p, const Eigen::MatrixBase<DerivedQ>& q) {
  if (p.size() != q.size()) throw std::invalid_argument("jsd: support mismatch");
  auto kl_to_mid = [](double a, double m) { return a > 0 ? a * std::log2(a / m) : 0.0; };
  double total = 0;
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double a = static_cast<double>(p(k));
    const double b = static_cast<double>(q(k));
    const double m = 0.5 * (a + b);
    total += 0.5 * kl_to_mid(a, m) + 0.5 * kl_to_mid(b, m);
  }
  // Rounding can push identical-support results a hair outside [0, 1].
  return std::clamp(total, 0.0, 1.0);
}

inline double jsd(const Histogram& p, const Histogram& q) {
  if (!p.normalized || !q.normalized) throw std::invalid_argument("jsd: histograms must be normalized");
  return jsd(p.bins, q.bins);
}

/// Exact Wasserstein-1 distance between two empirical samples (each sample
/// weighted uniformly). Throws on an empty sample.
double wasserstein_1d(std::vector<double> a, std::vector<double> b);

/// Root mean squared difference of two equal-length series.
double rmse(std::span<const double> a, std::span<const double> b);

}  // namespace tnsim::metrics

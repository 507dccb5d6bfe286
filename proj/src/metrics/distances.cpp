#include "tnsim/metrics/distances.hpp"

#include <algorithm>

namespace tnsim::metrics {

Histogram Histogram::from_counts(const Eigen::Ref<const Eigen::VectorXd>& counts) {
  if ((counts.array() < 0).any()) throw std::invalid_argument("histogram: negative bin");
  const double total = counts.sum();
  if (!(total > 0)) throw std::invalid_argument("histogram: no mass to normalize");
  return Histogram{counts / total, true};
}

Histogram Histogram::uniform(Eigen::Index n) {
  return Histogram{Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n)), true};
}

double wasserstein_1d(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein_1d: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double wa = 1.0 / static_cast<double>(a.size());
  const double wb = 1.0 / static_cast<double>(b.size());
  // Sweep the merged support, integrating |F_a - F_b| between breakpoints.
  std::size_t i = 0;
  std::size_t j = 0;
  double fa = 0;
  double fb = 0;
  double prev = std::min(a.front(), b.front());
  double total = 0;
  while (i < a.size() || j < b.size()) {
    const double next = (j >= b.size() || (i < a.size() && a[i] <= b[j])) ? a[i] : b[j];
    total += std::abs(fa - fb) * (next - prev);
    while (i < a.size() && a[i] == next) {
      fa += wa;
      ++i;
    }
    while (j < b.size() && b[j] == next) {
      fb += wb;
      ++j;
    }
    prev = next;
  }
  return total;
}

double rmse(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw std::invalid_argument("rmse: length mismatch");
  if (a.empty()) return 0.0;
  double sq = 0;
  for (std::size_t k = 0; k < a.size(); ++k) sq += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(sq / static_cast<double>(a.size()));
}

}  // namespace tnsim::metrics

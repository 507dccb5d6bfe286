#include "tnsim/metrics/regret.hpp"

#include <cmath>
#include <stdexcept>

namespace tnsim::metrics {

std::string category_name(Category c) {
  switch (c) {
    case Category::temporal_rhythms: return "TemporalRhythms";
    case Category::temporal_dynamics: return "TemporalDynamics";
    case Category::global_topology: return "GlobalTopology";
    case Category::local_topology: return "LocalTopology";
  }
  return "?";
}

RegretResult regret(const Eigen::MatrixXd& scores, const std::vector<Category>& metric_category,
                    const std::vector<bool>& higher_is_better) {
  const Eigen::Index m = scores.cols();
  if (static_cast<std::size_t>(m) != metric_category.size() ||
      static_cast<std::size_t>(m) != higher_is_better.size()) {
    throw std::invalid_argument("regret: one category and direction per metric column");
  }
  if (scores.rows() == 0) throw std::invalid_argument("regret: no settings");

  RegretResult out;
  Eigen::MatrixXd x = scores;
  std::vector<bool> usable(static_cast<std::size_t>(m), true);
  std::size_t floored = 0;
  for (Eigen::Index j = 0; j < m; ++j) {
    if (x.col(j).hasNaN()) {
      usable[static_cast<std::size_t>(j)] = false;
      out.flags.push_back("metric column " + std::to_string(j) + " skipped for some setting; dropped");
      continue;
    }
    if (higher_is_better[static_cast<std::size_t>(j)]) {
      x.col(j) = (1.0 - x.col(j).array()).matrix();
      out.flags.push_back("metric column " + std::to_string(j) + " entered as 1 - x");
    }
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
      if (x(i, j) < kRegretFloor) {
        x(i, j) = kRegretFloor;
        ++floored;
      }
    }
  }
  if (floored) out.flags.push_back(std::to_string(floored) + " score(s) raised to the 1e-12 floor");

  for (int c = 0; c < 4; ++c) {
    const auto cat = static_cast<Category>(c);
    Eigen::VectorXd log_sum = Eigen::VectorXd::Zero(x.rows());
    int count = 0;
    for (Eigen::Index j = 0; j < m; ++j) {
      if (!usable[static_cast<std::size_t>(j)] || metric_category[static_cast<std::size_t>(j)] != cat) continue;
      log_sum += (x.col(j).array() / x.col(j).minCoeff()).log().matrix();
      ++count;
    }
    if (count == 0) continue;
    out.categories.push_back(cat);
    out.regret.conservativeResize(x.rows(), static_cast<Eigen::Index>(out.categories.size()));
    out.regret.col(out.regret.cols() - 1) = ((log_sum / count).array().exp() - 1.0).max(0.0).matrix();
  }
  if (out.categories.empty()) throw std::invalid_argument("regret: every category is empty");
  return out;
}

}  // namespace tnsim::metrics

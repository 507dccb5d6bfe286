#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace tnsim::metrics {

enum class Category { temporal_rhythms, temporal_dynamics, global_topology, local_topology };

std::string category_name(Category c);

inline constexpr double kRegretFloor = 1e-12;

struct RegretResult {
  std::vector<Category> categories;  // columns, in enum order, only those with metrics
  Eigen::MatrixXd regret;            // settings x categories
  std::vector<std::string> flags;
};

/// scores is settings x metrics (NaN marks a skipped metric, which drops
/// that metric for every setting). For each metric, divide by the column
/// minimum; then regret(s, C) = geometric mean over the metrics of C, minus
/// one. Higher-is-better columns enter as 1 - x; entries below the floor are
/// raised to it. Both adjustments are flagged. Throws std::invalid_argument
/// when no category has a usable metric.
RegretResult regret(const Eigen::MatrixXd& scores, const std::vector<Category>& metric_category,
                    const std::vector<bool>& higher_is_better);

}  // namespace tnsim::metrics

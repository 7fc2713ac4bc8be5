#pragma once

#include <vector>

#include <Eigen/Dense>

namespace epscan {

// Minimum-cost perfect assignment on a square cost matrix (Hungarian method
// with potentials, O(n^3)). Returns match[row] = column.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost);

} // namespace epscan

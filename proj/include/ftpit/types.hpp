#pragma once

#include <Eigen/Dense>
#include <vector>

namespace ftpit {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Values at the M collocation nodes of one level.
using NodeValues = std::vector<Vector>;

}  // namespace ftpit

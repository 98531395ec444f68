#pragma once

#include <Eigen/Dense>

namespace composolve {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

} // namespace composolve

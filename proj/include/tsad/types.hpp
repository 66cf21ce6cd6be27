#pragma once

#include <Eigen/Dense>

namespace tsad {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace tsad

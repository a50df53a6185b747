#pragma once

#include <Eigen/Dense>

namespace plsreg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

}  // namespace plsreg

#pragma once

#include <Eigen/Dense>

namespace semicoupling {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

}  // namespace semicoupling

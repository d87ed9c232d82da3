#pragma once

#include <Eigen/Dense>

namespace berknash {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

}  // namespace berknash

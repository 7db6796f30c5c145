#pragma once

#include <Eigen/Dense>

namespace ringdeco {

/// exp(A) by Pade-13 scaling and squaring (Higham 2005 parameters).
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

}  // namespace ringdeco

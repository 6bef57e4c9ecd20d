#pragma once

#include <Eigen/Core>

namespace chronoscale {

/// State vector in R^n.
using Vector = Eigen::VectorXd;

}  // namespace chronoscale

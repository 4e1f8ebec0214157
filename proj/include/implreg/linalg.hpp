#pragma once

#include <Eigen/Dense>

namespace implreg {

struct SymmetricEigen {
    Eigen::VectorXd values;   // descending
    Eigen::MatrixXd vectors;  // columns match values
};

// Only the lower triangle of `a` is read; `a` is consumed.
SymmetricEigen symmetric_eigen(Eigen::MatrixXd a);

}  // namespace implreg

#pragma once

#include <Eigen/Dense>

namespace dqcp {

struct SymmetricEigen {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns, matching `values`
  int sweeps = 0;
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Only the lower
// triangle is read.
SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& a, double tol = 1e-15, int max_sweeps = 60);

// Largest λ with A x = λ B x, for symmetric A and positive definite B.
// Throws DomainError when B is not positive definite.
double max_generalized_eigenvalue(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

}  // namespace dqcp

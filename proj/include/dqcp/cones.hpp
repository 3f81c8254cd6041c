#pragma once

#include <Eigen/Dense>

#include "dqcp/conic_problem.hpp"

namespace dqcp {

// Euclidean projections onto the standard cones. `v` must have cone.dim
// entries (ShapeError otherwise).
Eigen::VectorXd project(const Cone& cone, const Eigen::VectorXd& v);

Eigen::VectorXd project_soc(const Eigen::VectorXd& v);
Eigen::VectorXd project_rsoc(const Eigen::VectorXd& v);
Eigen::VectorXd project_psd(const Eigen::VectorXd& v, int order);
Eigen::Vector3d project_exp(const Eigen::Vector3d& v);

bool in_exp_cone(const Eigen::Vector3d& v, double tol);

// A fixed point deep inside the cone (zero for the zero cone); the solver
// shifts cones along it to return strictly interior points.
Eigen::VectorXd interior_direction(const Cone& cone);

// Scaled lower-triangle vector <-> symmetric matrix.
Eigen::MatrixXd psd_unpack(const Eigen::VectorXd& v, int order);
Eigen::VectorXd psd_pack(const Eigen::MatrixXd& m);

}  // namespace dqcp

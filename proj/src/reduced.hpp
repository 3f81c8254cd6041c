#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "dqcp/conic_problem.hpp"
#include "dqcp/solver.hpp"

namespace dqcp::detail {

// The feasibility problem with equality rows folded into the affine set:
// the remaining slack is u = c + U w for orthonormal U, and every w maps
// back to solver coordinates through to_x.
struct Reduced {
  struct Block {
    Cone cone;
    int offset = 0;  // into u
  };

  const ConicProblem* problem = nullptr;
  std::vector<Block> blocks;
  Eigen::VectorXd x0;
  Eigen::MatrixXd null;
  Eigen::VectorXd c;
  Eigen::MatrixXd u;
  Eigen::MatrixXd v;
  Eigen::VectorXd sigma;

  int rows() const { return static_cast<int>(c.size()); }
  Eigen::VectorXd to_x(const Eigen::VectorXd& w) const;
  // Snaps single-coordinate equalities and measures the cone residual.
  FeasOutcome accept(const Eigen::VectorXd& x, int iterations) const;
};

FeasOutcome make_outcome(FeasStatus st, int iterations, std::string msg);

// Returns an outcome instead when the problem is decided during reduction
// (trivially infeasible or inconsistent equalities).
std::optional<FeasOutcome> reduce(const ConicProblem& p, const SolverOptions& opts, Reduced& out);

}  // namespace dqcp::detail

#include "dqcp/jacobi.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "dqcp/error.hpp"

namespace dqcp {

SymmetricEigen jacobi_eigen(const Eigen::MatrixXd& input, double tol, int max_sweeps) {
  const Eigen::Index n = input.rows();
  if (input.cols() != n) throw ShapeError("jacobi_eigen: matrix must be square");
  Eigen::MatrixXd a = input.triangularView<Eigen::Lower>();
  a.triangularView<Eigen::StrictlyUpper>() = a.transpose().triangularView<Eigen::StrictlyUpper>();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);

  SymmetricEigen out;
  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (Eigen::Index q = 1; q < n; ++q) {
      for (Eigen::Index p = 0; p < q; ++p) off += a(p, q) * a(p, q);
    }
    if (std::sqrt(off) <= tol * scale) break;
    out.sweeps = sweep + 1;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        // Rotation angle zeroing a(p, q); the smaller root keeps it stable.
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        a(p, q) = a(q, p) = 0.0;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) { return a(i, i) < a(j, j); });
  out.values.resize(n);
  out.vectors.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out.values(k) = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    out.vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return out;
}

double max_generalized_eigenvalue(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows()) {
    throw ShapeError("gen_lambda_max: arguments must be square matrices of equal order");
  }
  const Eigen::MatrixXd bs = 0.5 * (b + b.transpose());
  Eigen::LLT<Eigen::MatrixXd> llt(bs);
  if (llt.info() != Eigen::Success || llt.matrixLLT().diagonal().minCoeff() <= 0.0) {
    throw DomainError("gen_lambda_max: second argument is not positive definite");
  }
  const Eigen::MatrixXd as = 0.5 * (a + a.transpose());
  const Eigen::MatrixXd l = llt.matrixL();
  // C = L⁻¹ A L⁻ᵀ has the generalized eigenvalues of (A, B).
  Eigen::MatrixXd c = l.triangularView<Eigen::Lower>().solve(as);
  c = l.triangularView<Eigen::Lower>().solve(c.transpose()).transpose();
  return jacobi_eigen(c).values.maxCoeff();
}

}  // namespace dqcp

#include <cmath>
#include <limits>

#include "dqcp/cones.hpp"
#include "dqcp/error.hpp"
#include "dqcp/solver.hpp"
#include "reduced.hpp"

// Phase-I interior-point method: minimize s subject to c + U w + s·e ∈ K,
// where e is a fixed interior direction. A negative s certifies a strictly
// feasible point; a dual vector y ∈ K* with Uᵀy = 0 and cᵀy < 0 certifies
// infeasibility.

namespace dqcp {
namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kSqrt2 = 1.4142135623730951;
constexpr double kInfeasTol = 1e-7;

struct Block {
  Cone cone;
  int offset;
};

// Value, gradient and Hessian of the standard barrier of one block; +inf
// outside the interior.
double barrier(const Block& b, const VectorXd& u, VectorXd* g, MatrixXd* h) {
  const int m = b.cone.dim;
  const VectorXd x = u.segment(b.offset, m);
  switch (b.cone.kind) {
    case ConeKind::zero:
      return 0.0;
    case ConeKind::nonneg: {
      if ((x.array() <= 0.0).any()) return kInf;
      if (g) g->segment(b.offset, m) = -x.cwiseInverse();
      if (h) h->block(b.offset, b.offset, m, m) = x.array().square().inverse().matrix().asDiagonal();
      return -x.array().log().sum();
    }
    case ConeKind::soc:
    case ConeKind::rsoc: {
      VectorXd df(m);
      MatrixXd d2f = MatrixXd::Zero(m, m);
      double f;
      if (b.cone.kind == ConeKind::soc) {
        if (x(0) <= 0.0) return kInf;
        f = x(0) * x(0) - x.tail(m - 1).squaredNorm();
        df(0) = 2.0 * x(0);
        df.tail(m - 1) = -2.0 * x.tail(m - 1);
        d2f.diagonal().setConstant(-2.0);
        d2f(0, 0) = 2.0;
      } else {
        if (x(0) <= 0.0 || x(1) <= 0.0) return kInf;
        f = 2.0 * x(0) * x(1) - x.tail(m - 2).squaredNorm();
        df(0) = 2.0 * x(1);
        df(1) = 2.0 * x(0);
        df.tail(m - 2) = -2.0 * x.tail(m - 2);
        d2f.diagonal().setConstant(-2.0);
        d2f(0, 0) = d2f(1, 1) = 0.0;
        d2f(0, 1) = d2f(1, 0) = 2.0;
      }
      if (!(f > 0.0)) return kInf;
      if (g) g->segment(b.offset, m) = -df / f;
      if (h) h->block(b.offset, b.offset, m, m) = df * df.transpose() / (f * f) - d2f / f;
      return -std::log(f);
    }
    case ConeKind::psd: {
      const int n = b.cone.order;
      const MatrixXd xm = psd_unpack(x, n);
      Eigen::LLT<MatrixXd> llt(xm);
      if (llt.info() != Eigen::Success) return kInf;
      const MatrixXd l = llt.matrixL();
      if ((l.diagonal().array() <= 0.0).any()) return kInf;
      const MatrixXd inv = llt.solve(MatrixXd::Identity(n, n));
      if (g) g->segment(b.offset, m) = -psd_pack(inv);
      if (h) {
        for (int a = 0; a < m; ++a) {
          VectorXd ea = VectorXd::Zero(m);
          ea(a) = 1.0;
          h->block(b.offset, b.offset + a, m, 1) = psd_pack(inv * psd_unpack(ea, n) * inv);
        }
      }
      return -2.0 * l.diagonal().array().log().sum();
    }
    case ConeKind::exp: {
      double total = 0.0;
      for (int k = 0; k < m; k += 3) {
        const double a = x(k), y = x(k + 1), z = x(k + 2);
        if (y <= 0.0 || z <= 0.0) return kInf;
        const double lr = std::log(z / y);
        const double psi = y * lr - a;
        if (!(psi > 0.0)) return kInf;
        total += -std::log(psi) - std::log(y) - std::log(z);
        const Eigen::Vector3d dpsi(-1.0, lr - 1.0, y / z);
        if (g) g->segment<3>(b.offset + k) = -dpsi / psi - Eigen::Vector3d(0.0, 1.0 / y, 1.0 / z);
        if (h) {
          Eigen::Matrix3d d2 = Eigen::Matrix3d::Zero();
          d2(1, 1) = -1.0 / y;
          d2(1, 2) = d2(2, 1) = 1.0 / z;
          d2(2, 2) = -y / (z * z);
          Eigen::Matrix3d hk = dpsi * dpsi.transpose() / (psi * psi) - d2 / psi;
          hk(1, 1) += 1.0 / (y * y);
          hk(2, 2) += 1.0 / (z * z);
          h->block<3, 3>(b.offset + k, b.offset + k) = hk;
        }
      }
      return total;
    }
  }
  return kInf;
}

double degree(const Cone& c) {
  switch (c.kind) {
    case ConeKind::zero: return 0.0;
    case ConeKind::nonneg: return c.dim;
    case ConeKind::soc:
    case ConeKind::rsoc: return 2.0;
    case ConeKind::psd: return c.order;
    case ConeKind::exp: return c.dim;
  }
  return 0.0;
}

bool in_dual(const Block& b, const VectorXd& y, double tol) {
  const VectorXd x = y.segment(b.offset, b.cone.dim);
  const int m = b.cone.dim;
  switch (b.cone.kind) {
    case ConeKind::zero: return true;
    case ConeKind::nonneg: return x.minCoeff() >= -tol;
    case ConeKind::soc: return x(0) >= x.tail(m - 1).norm() - tol;
    case ConeKind::rsoc: {
      VectorXd s(m);
      s(0) = (x(0) + x(1)) / kSqrt2;
      s(1) = (x(0) - x(1)) / kSqrt2;
      s.tail(m - 2) = x.tail(m - 2);
      return s(0) >= s.tail(m - 1).norm() - tol;
    }
    case ConeKind::psd: {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(psd_unpack(x, b.cone.order), Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff() >= -tol;
    }
    case ConeKind::exp:
      for (int k = 0; k < m; k += 3) {
        const double u = x(k), v = x(k + 1), w = x(k + 2);
        if (u > tol) return false;
        if (u >= -tol) {
          if (v < -tol || w < -tol) return false;
          continue;
        }
        if (w <= 0.0) return false;
        if (std::log(-u) + v / u > 1.0 + std::log(w) + tol) return false;
      }
      return true;
  }
  return false;
}

}  // namespace

FeasOutcome solve_barrier(const ConicProblem& p, const SolverOptions& opts) {
  using detail::make_outcome;
  detail::Reduced red;
  if (auto done = detail::reduce(p, opts, red)) return *done;

  const int mr = red.rows();
  const int r = static_cast<int>(red.u.cols());
  std::vector<Block> blocks;
  VectorXd e = VectorXd::Zero(mr);
  double nu = 0.0;
  for (const auto& b : red.blocks) {
    blocks.push_back({b.cone, b.offset});
    e.segment(b.offset, b.cone.dim) = interior_direction(b.cone);
    nu += degree(b.cone);
  }
  // Columns: U for w, then e for s.
  MatrixXd bmat(mr, r + 1);
  bmat << red.u, e;

  auto value = [&](const VectorXd& u, VectorXd* g, MatrixXd* h) {
    double f = 0.0;
    for (const auto& b : blocks) {
      f += barrier(b, u, g, h);
      if (!std::isfinite(f)) return kInf;
    }
    return f;
  };

  // Start from the part of c orthogonal to range(U).
  VectorXd w = -red.u.transpose() * red.c;
  double s = 1.0 + (red.c + red.u * w).cwiseAbs().maxCoeff();
  for (int k = 0; k < 200 && !std::isfinite(value(red.c + s * e, nullptr, nullptr)); ++k) s *= 2.0;
  if (!std::isfinite(value(red.c + s * e, nullptr, nullptr))) {
    throw SolverError("no interior starting point for the barrier method");
  }

  // A weak proximal term keeps centering bounded along recession
  // directions of the cones, where the barrier alone decreases forever.
  const double mu = 1e-9 / ((1.0 + red.c.norm()) * (1.0 + red.c.norm()));
  const double tau_max = 1e14 * std::max(nu, 1.0);
  double tau = std::max(nu / s, 1e-6);
  int newton = 0;
  const int newton_max = std::max(opts.max_iters / 40, 200);
  VectorXd g(mr);
  MatrixXd h = MatrixXd::Zero(mr, mr);

  auto try_accept = [&](int it) -> std::optional<FeasOutcome> {
    FeasOutcome o = red.accept(red.to_x(w), it);
    if (o.residual <= opts.eps_feas) return o;
    return std::nullopt;
  };

  while (tau <= tau_max) {
    for (int step = 0; step < 100; ++step) {
      VectorXd u = red.c + red.u * w + s * e;
      h.setZero();
      const double f = value(u, &g, &h);
      if (!std::isfinite(f)) throw SolverError("barrier iterate left the cone interior");
      VectorXd grad = bmat.transpose() * g;
      grad(r) += tau;
      grad.head(r) += mu * w;
      MatrixXd hess = bmat.transpose() * h * bmat;
      const double ridge = 1e-13 * (1.0 + hess.diagonal().cwiseAbs().maxCoeff());
      hess.diagonal().array() += ridge;
      hess.diagonal().head(r).array() += mu;
      Eigen::LDLT<MatrixXd> ldlt(hess);
      if (ldlt.info() != Eigen::Success) throw SolverError("barrier Newton system is singular");
      const VectorXd dir = -ldlt.solve(grad);
      if (!dir.allFinite()) throw SolverError("non-finite barrier Newton step");
      const double dec = -grad.dot(dir);
      if (dec < 1e-10) break;

      const double phi = tau * s + f + 0.5 * mu * w.squaredNorm();
      double alpha = 1.0;
      bool moved = false;
      for (int ls = 0; ls < 60; ++ls) {
        const VectorXd wn = w + alpha * dir.head(r);
        const double sn = s + alpha * dir(r);
        const double fn = value(red.c + red.u * wn + sn * e, nullptr, nullptr);
        if (std::isfinite(fn) && tau * sn + fn + 0.5 * mu * wn.squaredNorm() <= phi - 0.25 * alpha * dec) {
          w = wn;
          s = sn;
          moved = true;
          break;
        }
        alpha *= 0.5;
      }
      ++newton;
      if (s < 0.0) {
        if (auto o = try_accept(newton)) return *o;
      }
      if (!moved || newton >= newton_max) break;
    }
    if (newton >= newton_max) break;

    // Farkas test at the current center. y = -∇F(u) lies in K*, and
    // centering drives Uᵀy to zero. When the centering problem is unbounded
    // (rows that can grow forever) Uᵀy only gets small, so y is accepted
    // once ‖Uᵀy‖ ≤ kInfeasTol·|cᵀy|/(1 + ‖c‖): any feasible point then has
    // ‖w‖ ≥ (1 + ‖c‖)/kInfeasTol.
    const VectorXd u = red.c + red.u * w + s * e;
    g.setZero();
    value(u, &g, nullptr);
    const VectorXd y = -g;
    const double yn = y.norm();
    const double cy = red.c.dot(y);
    if (yn > 0.0 && cy < 0.0 && (red.u.transpose() * y).norm() * (1.0 + red.c.norm()) <= kInfeasTol * -cy) {
      const double tol = 1e-12 * std::max(1.0, yn);
      bool dual = true;
      for (const auto& b : blocks) dual = dual && in_dual(b, y, tol);
      const double gap = -cy / yn;
      if (dual && gap > opts.eps_gap) {
        FeasOutcome o = make_outcome(FeasStatus::infeasible, newton, "dual certificate");
        o.gap_norm = gap;
        o.residual = gap;
        return o;
      }
    }
    if (s * e.cwiseAbs().maxCoeff() <= opts.eps_feas) {
      if (auto o = try_accept(newton)) return *o;
    }
    tau *= 10.0;
  }
  if (auto o = try_accept(newton)) return *o;
  FeasOutcome o = make_outcome(FeasStatus::inconclusive, newton, "barrier method did not settle the level");
  o.residual = red.accept(red.to_x(w), newton).residual;
  return o;
}

}  // namespace dqcp

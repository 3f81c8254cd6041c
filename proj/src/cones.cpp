#include "dqcp/cones.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dqcp/error.hpp"
#include "dqcp/jacobi.hpp"

namespace dqcp {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

// Exponential cone, region 4: the projection is y(ρ)·(ρ, 1, e^ρ) and the
// residual a(ρ)·(1, 1 - ρ, -e^-ρ) lies on the polar cone, with ρ the root of
// y(ρ)e^ρ - a(ρ)e^-ρ = t.
struct ExpRoot {
  double r, s, t;

  double y(double rho) const { return ((rho - 1.0) * r + s) / (rho * rho - rho + 1.0); }
  double a(double rho) const { return (r - rho * s) / (rho * rho - rho + 1.0); }
  double h(double rho) const { return y(rho) * std::exp(rho) - a(rho) * std::exp(-rho) - t; }
  Eigen::Vector3d point(double rho) const {
    const double yy = std::max(y(rho), 0.0);
    return {yy * rho, yy, yy * std::exp(rho)};
  }
};

constexpr double kRhoCap = 600.0;

bool exp_root(const ExpRoot& f, double& rho_out) {
  const double r = f.r, s = f.s;
  double lo = -kRhoCap, hi = kRhoCap;
  // Interval where both y(ρ) > 0 and a(ρ) > 0.
  if (r > 0) lo = std::max(lo, 1.0 - s / r);
  else if (r < 0) hi = std::min(hi, 1.0 - s / r);
  if (s > 0) hi = std::min(hi, r / s);
  else if (s < 0) lo = std::max(lo, r / s);
  if (!(lo < hi)) return false;
  double hlo = f.h(lo), hhi = f.h(hi);
  if (!std::isfinite(hlo)) hlo = -std::numeric_limits<double>::infinity();
  if (!std::isfinite(hhi)) hhi = std::numeric_limits<double>::infinity();
  // Points within rounding of the boundary put the root on an end of the
  // interval, where h may come out a few ulps on the wrong side.
  const double slack = 1e-12 * (1.0 + std::abs(f.t));
  if (hlo > 0 && hlo <= slack) {
    rho_out = lo;
    return true;
  }
  if (hhi < 0 && hhi >= -slack) {
    rho_out = hi;
    return true;
  }
  if (hlo > 0 || hhi < 0) return false;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
    const double mid = 0.5 * (lo + hi);
    const double hm = f.h(mid);
    if (hm < 0) lo = mid;
    else hi = mid;
  }
  rho_out = 0.5 * (lo + hi);
  return true;
}

// Fallback: maximize <v, w>/‖w‖ over w(ρ) = (ρ, 1, e^ρ) by a grid search
// refined with golden sections.
Eigen::Vector3d exp_search(const Eigen::Vector3d& v) {
  auto score = [&](double rho) {
    const Eigen::Vector3d w(rho, 1.0, std::exp(rho));
    return v.dot(w) / w.norm();
  };
  double best = -30.0;
  for (double rho = -30.0; rho <= 30.0; rho += 0.01) {
    if (score(rho) > score(best)) best = rho;
  }
  double a = best - 0.01, b = best + 0.01;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double c = b - g * (b - a), d = a + g * (b - a);
    if (score(c) > score(d)) b = d;
    else a = c;
  }
  const double rho = 0.5 * (a + b);
  const Eigen::Vector3d w(rho, 1.0, std::exp(rho));
  const double y = std::max(0.0, v.dot(w) / w.squaredNorm());
  return y * w;
}

void require_dim(const Cone& c, Eigen::Index n) {
  if (n != c.dim) {
    throw ShapeError("cone " + c.str() + " expects " + std::to_string(c.dim) + " entries, got " +
                     std::to_string(n));
  }
}

}  // namespace

bool in_exp_cone(const Eigen::Vector3d& v, double tol) {
  const double x = v(0), y = v(1), z = v(2);
  if (y > 0) return y * std::exp(x / y) <= z + tol;
  return y >= -tol && x <= tol && z >= -tol;
}

Eigen::Vector3d project_exp(const Eigen::Vector3d& v) {
  const double r = v(0), s = v(1), t = v(2);
  if (in_exp_cone(v, 0.0)) return v;
  // Polar cone: r e^{s/r - 1} ≤ -t with r > 0, or r = 0, s ≤ 0, t ≤ 0.
  if ((r > 0 && r * std::exp(s / r - 1.0) <= -t) || (r == 0 && s <= 0 && t <= 0)) {
    return Eigen::Vector3d::Zero();
  }
  if (r <= 0 && s <= 0) return {r, 0.0, std::max(t, 0.0)};

  Eigen::Vector3d best = Eigen::Vector3d::Zero();
  double best_dist = v.norm();
  auto consider = [&](const Eigen::Vector3d& p) {
    if (!p.allFinite() || !in_exp_cone(p, 1e-12 * (1.0 + p.norm()))) return;
    const double d = (v - p).norm();
    if (d < best_dist) {
      best_dist = d;
      best = p;
    }
  };
  if (r <= 0) consider({r, 0.0, std::max(t, 0.0)});

  const ExpRoot f{r, s, t};
  double rho = 0.0;
  if (exp_root(f, rho)) {
    const Eigen::Vector3d p = f.point(rho);
    consider(p);
    // Accept the root when the residual is orthogonal to the point and
    // lies in the polar cone; otherwise fall back to the search.
    const Eigen::Vector3d d = v - p;
    const bool polar_ok = d(0) >= -1e-12 && (d(0) <= 1e-300 || d(0) * std::exp(d(1) / d(0) - 1.0) <= -d(2) + 1e-9 * (1.0 + v.norm()));
    if (polar_ok && std::abs(p.dot(d)) <= 1e-9 * (1.0 + v.squaredNorm())) return best;
  }
  consider(exp_search(v));
  return best;
}

Eigen::VectorXd project_soc(const Eigen::VectorXd& v) {
  if (v.size() == 0) return v;
  const double t = v(0);
  const double nx = v.size() > 1 ? v.tail(v.size() - 1).norm() : 0.0;
  if (nx <= t) return v;
  if (nx <= -t) return Eigen::VectorXd::Zero(v.size());
  const double alpha = 0.5 * (t + nx);
  Eigen::VectorXd out(v.size());
  out(0) = alpha;
  out.tail(v.size() - 1) = (alpha / nx) * v.tail(v.size() - 1);
  return out;
}

Eigen::VectorXd project_rsoc(const Eigen::VectorXd& v) {
  // (u, v, w) ↦ ((u+v)/√2, (u-v)/√2, w) is an orthogonal involution taking
  // the rotated cone onto the standard one.
  Eigen::VectorXd w = v;
  w(0) = (v(0) + v(1)) / kSqrt2;
  w(1) = (v(0) - v(1)) / kSqrt2;
  Eigen::VectorXd p = project_soc(w);
  Eigen::VectorXd out = p;
  out(0) = (p(0) + p(1)) / kSqrt2;
  out(1) = (p(0) - p(1)) / kSqrt2;
  return out;
}

Eigen::MatrixXd psd_unpack(const Eigen::VectorXd& v, int n) {
  Eigen::MatrixXd m(n, n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j, ++k) {
      const double x = i == j ? v(k) : v(k) / kSqrt2;
      m(i, j) = m(j, i) = x;
    }
  }
  return m;
}

Eigen::VectorXd psd_pack(const Eigen::MatrixXd& m) {
  const int n = static_cast<int>(m.rows());
  Eigen::VectorXd v(n * (n + 1) / 2);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j, ++k) v(k) = i == j ? m(i, j) : kSqrt2 * m(i, j);
  }
  return v;
}

Eigen::VectorXd project_psd(const Eigen::VectorXd& v, int n) {
  const SymmetricEigen eig = jacobi_eigen(psd_unpack(v, n));
  const Eigen::VectorXd clamped = eig.values.cwiseMax(0.0);
  const Eigen::MatrixXd m = eig.vectors * clamped.asDiagonal() * eig.vectors.transpose();
  return psd_pack(0.5 * (m + m.transpose()));
}

Eigen::VectorXd project(const Cone& cone, const Eigen::VectorXd& v) {
  require_dim(cone, v.size());
  switch (cone.kind) {
    case ConeKind::zero:
      return Eigen::VectorXd::Zero(v.size());
    case ConeKind::nonneg:
      return v.cwiseMax(0.0);
    case ConeKind::soc:
      return project_soc(v);
    case ConeKind::rsoc:
      return project_rsoc(v);
    case ConeKind::psd:
      return project_psd(v, cone.order);
    case ConeKind::exp:
      break;
  }
  Eigen::VectorXd out(v.size());
  for (Eigen::Index k = 0; k + 2 < v.size(); k += 3) out.segment<3>(k) = project_exp(v.segment<3>(k));
  return out;
}

Eigen::VectorXd interior_direction(const Cone& cone) {
  Eigen::VectorXd e = Eigen::VectorXd::Zero(cone.dim);
  switch (cone.kind) {
    case ConeKind::zero:
      break;
    case ConeKind::nonneg:
      e.setOnes();
      break;
    case ConeKind::soc:
      e(0) = 1.0;
      break;
    case ConeKind::rsoc:
      e(0) = e(1) = 1.0;
      break;
    case ConeKind::psd:
      e = psd_pack(Eigen::MatrixXd::Identity(cone.order, cone.order));
      break;
    case ConeKind::exp:
      for (int k = 0; k + 2 < cone.dim; k += 3) e.segment<3>(k) = Eigen::Vector3d(-1.0, 1.0, 1.0);
      break;
  }
  return e;
}

}  // namespace dqcp

#include "dqcp/solver.hpp"

#include <cmath>

#include "dqcp/cones.hpp"
#include "dqcp/error.hpp"
#include "reduced.hpp"

namespace dqcp {

std::string_view to_string(FeasStatus s) {
  switch (s) {
    case FeasStatus::feasible: return "feasible";
    case FeasStatus::infeasible: return "infeasible";
    case FeasStatus::inconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Orthonormal bases from an SVD, dropping singular values below a relative
// threshold.
struct Basis {
  MatrixXd u;      // range, orthonormal columns
  MatrixXd v;      // co-range
  VectorXd sigma;  // retained singular values
  MatrixXd null;   // null space of the operator (only when requested)
};

Basis decompose(const MatrixXd& m, bool want_null) {
  Basis out;
  const Eigen::Index n = m.cols();
  if (m.rows() == 0 || n == 0) {
    out.u = MatrixXd(m.rows(), 0);
    out.v = MatrixXd(n, 0);
    out.sigma = VectorXd(0);
    out.null = MatrixXd::Identity(n, n);
    return out;
  }
  const unsigned flags = want_null ? (Eigen::ComputeThinU | Eigen::ComputeFullV)
                                   : (Eigen::ComputeThinU | Eigen::ComputeThinV);
  Eigen::BDCSVD<MatrixXd> svd(m, flags);
  const VectorXd& s = svd.singularValues();
  if (!s.allFinite()) throw SolverError("singular value decomposition broke down");
  const double smax = s.size() ? s(0) : 0.0;
  const double tol = 1e-12 * std::max(smax, 1.0) * static_cast<double>(std::max(m.rows(), n));
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol) ++r;
  out.u = svd.matrixU().leftCols(r);
  out.v = svd.matrixV().leftCols(r);
  out.sigma = s.head(r);
  if (want_null) out.null = svd.matrixV().rightCols(n - r);
  return out;
}

class ShiftedCones {
 public:
  ShiftedCones(std::vector<detail::Reduced::Block> blocks, double margin) : blocks_(std::move(blocks)) {
    int m = 0;
    for (const auto& b : blocks_) m += b.cone.dim;
    shift_ = VectorXd::Zero(m);
    for (const auto& b : blocks_) shift_.segment(b.offset, b.cone.dim) = margin * interior_direction(b.cone);
  }

  VectorXd project(const VectorXd& v) const {
    VectorXd out(v.size());
    for (const auto& b : blocks_) {
      const VectorXd w = v.segment(b.offset, b.cone.dim) - shift_.segment(b.offset, b.cone.dim);
      out.segment(b.offset, b.cone.dim) = dqcp::project(b.cone, w) + shift_.segment(b.offset, b.cone.dim);
    }
    return out;
  }

 private:
  std::vector<detail::Reduced::Block> blocks_;
  VectorXd shift_;
};

}  // namespace

namespace detail {

FeasOutcome make_outcome(FeasStatus st, int iterations, std::string msg) {
  FeasOutcome o;
  o.status = st;
  o.iterations = iterations;
  o.message = std::move(msg);
  return o;
}

Eigen::VectorXd Reduced::to_x(const Eigen::VectorXd& w) const {
  const VectorXd z = v * (sigma.cwiseInverse().asDiagonal() * w);
  return x0 + null * z;
}

FeasOutcome Reduced::accept(const Eigen::VectorXd& x, int iterations) const {
  const ConicProblem& p = *problem;
  FeasOutcome o = make_outcome(FeasStatus::feasible, iterations, "");
  o.x.assign(x.data(), x.data() + x.size());
  // Equalities fixing a single coordinate are satisfied exactly.
  for (const auto& blk : p.blocks) {
    if (blk.cone.kind != ConeKind::zero) continue;
    for (int k = 0; k < blk.cone.dim; ++k) {
      const int row = blk.offset + k;
      int nnz = 0, col = -1;
      for (int j = 0; j < p.num_vars; ++j) {
        if (p.A(row, j) != 0.0) {
          ++nnz;
          col = j;
        }
      }
      if (nnz == 1) o.x[static_cast<std::size_t>(col)] = -p.b(row) / p.A(row, col);
    }
  }
  o.residual = p.cone_distance(o.x);
  return o;
}

std::optional<FeasOutcome> reduce(const ConicProblem& p, const SolverOptions& opts, Reduced& out) {
  if (p.trivially_infeasible) {
    return make_outcome(FeasStatus::infeasible, 0, "trivially infeasible: " + p.infeasible_reason);
  }
  const int n = p.num_vars;
  out.problem = &p;

  std::vector<int> zero_rows, rest_rows;
  for (const auto& blk : p.blocks) {
    auto& dst = blk.cone.kind == ConeKind::zero ? zero_rows : rest_rows;
    if (blk.cone.kind != ConeKind::zero) out.blocks.push_back({blk.cone, static_cast<int>(rest_rows.size())});
    for (int k = 0; k < blk.cone.dim; ++k) dst.push_back(blk.offset + k);
  }
  const auto mz = static_cast<Eigen::Index>(zero_rows.size());
  const auto mr = static_cast<Eigen::Index>(rest_rows.size());
  MatrixXd az(mz, n), ar(mr, n);
  VectorXd bz(mz), br(mr);
  for (Eigen::Index i = 0; i < mz; ++i) {
    az.row(i) = p.A.row(zero_rows[static_cast<std::size_t>(i)]);
    bz(i) = p.b(zero_rows[static_cast<std::size_t>(i)]);
  }
  for (Eigen::Index i = 0; i < mr; ++i) {
    ar.row(i) = p.A.row(rest_rows[static_cast<std::size_t>(i)]);
    br(i) = p.b(rest_rows[static_cast<std::size_t>(i)]);
  }

  // Equality rows: x = x0 + N z.
  const Basis eq = decompose(az, true);
  out.x0 = VectorXd::Zero(n);
  if (eq.sigma.size() > 0) out.x0 = -eq.v * (eq.sigma.cwiseInverse().asDiagonal() * (eq.u.transpose() * bz));
  const double eq_res = mz ? (az * out.x0 + bz).norm() : 0.0;
  if (eq_res > std::max(opts.eps_feas, 1e-12 * bz.norm())) {
    FeasOutcome o = make_outcome(FeasStatus::infeasible, 0, "equality constraints are inconsistent");
    o.gap_norm = eq_res;
    return o;
  }
  out.null = eq.null;
  out.c = ar * out.x0 + br;
  const Basis range = decompose(ar * eq.null, false);
  out.u = range.u;
  out.v = range.v;
  out.sigma = range.sigma;
  if (mr == 0) return out.accept(out.x0, 0);
  return std::nullopt;
}

}  // namespace detail

using detail::make_outcome;

FeasOutcome solve_feasibility(const ConicProblem& p, const SolverOptions& opts) {
  detail::Reduced red;
  if (auto done = detail::reduce(p, opts, red)) return *done;
  const Eigen::Index mr = red.rows();
  const VectorXd& c = red.c;
  // Affine set S = {c + U w}; P_S(v) = c + U Uᵀ (v - c).
  const MatrixXd& u = red.u;
  const ShiftedCones cones(red.blocks, opts.interior_margin);

  // One pass of the fixed-point map T(k) = P_K(P_S(k)).
  struct Step {
    VectorXd s, knew;
    double dn = 0.0;
  };
  auto step = [&](const VectorXd& k, const VectorXd& q) {
    Step st;
    st.s = c + u * (u.transpose() * (k - c));
    const VectorXd v = opts.dykstra ? VectorXd(st.s + q) : st.s;
    st.knew = cones.project(v);
    st.dn = (st.s - cones.project(st.s)).norm();
    if (!std::isfinite(st.dn) || !st.knew.allFinite()) throw SolverError("non-finite iterate in alternating projections");
    return st;
  };
  auto accept = [&](const Step& st, int it) { return red.accept(red.to_x(u.transpose() * (st.s - c)), it); };

  const bool anderson = opts.anderson > 0 && !opts.dykstra;
  const int mem = std::max(opts.anderson, 1);
  MatrixXd dk(mr, 0), dg(mr, 0);
  VectorXd k = cones.project(c);
  VectorXd q = VectorXd::Zero(mr);
  Step cur = step(k, q);
  bool use_aa = anderson;
  double window_best = cur.dn;
  VectorXd d_prev;
  for (int it = 1; it <= opts.max_iters; ++it) {
    if (cur.dn <= opts.eps_feas) return accept(cur, it);
    const VectorXd g = cur.knew - k;
    VectorXd next = cur.knew;
    if (opts.dykstra) q = (cur.s + q) - cur.knew;

    Step nst;
    bool done = false;
    if (use_aa && dk.cols() > 0) {
      // Type-II Anderson extrapolation, kept only when it lowers the residual.
      const VectorXd gamma = dg.colPivHouseholderQr().solve(g);
      const VectorXd cand = cur.knew - (dk + dg) * gamma;
      if (cand.allFinite()) {
        Step ast = step(cand, q);
        if ((ast.knew - cand).norm() <= g.norm()) {
          next = cand;
          nst = std::move(ast);
          done = true;
        }
      }
    }
    if (!done) nst = step(next, q);
    if (use_aa) {
      const VectorXd gn = nst.knew - next;
      if (dk.cols() == mem) {
        dk.leftCols(mem - 1) = dk.rightCols(mem - 1).eval();
        dg.leftCols(mem - 1) = dg.rightCols(mem - 1).eval();
      } else {
        dk.conservativeResize(Eigen::NoChange, dk.cols() + 1);
        dg.conservativeResize(Eigen::NoChange, dg.cols() + 1);
      }
      dk.col(dk.cols() - 1) = next - k;
      dg.col(dg.cols() - 1) = gn - g;
    }
    k = std::move(next);
    cur = std::move(nst);

    if (it % opts.window == 0) {
      // Acceleration that stopped paying off usually means there is no
      // fixed point; plain steps make the displacement test reliable.
      if (use_aa && cur.dn > 0.99 * window_best) {
        use_aa = false;
        dk.resize(mr, 0);
        dg.resize(mr, 0);
      }
      window_best = std::min(window_best, cur.dn);
      const VectorXd d = cur.s - cur.knew;
      if (!use_aa && d_prev.size() == d.size() && cur.dn > opts.eps_gap &&
          (d - d_prev).norm() <= opts.stall_tol * d.norm()) {
        FeasOutcome o = make_outcome(FeasStatus::infeasible, it, "displacement converged");
        o.gap_norm = d.norm();
        o.residual = cur.dn;
        return o;
      }
      d_prev = use_aa ? VectorXd() : d;
    }
  }
  FeasOutcome o = make_outcome(FeasStatus::inconclusive, opts.max_iters, "iteration limit reached");
  o.residual = cur.dn;
  return o;
}

namespace {

class ProjectionSolver final : public FeasibilitySolver {
 public:
  explicit ProjectionSolver(SolverOptions o) : opts_(o) {}
  std::string_view name() const override { return "projection"; }
  FeasOutcome solve(const ConicProblem& p) const override { return solve_feasibility(p, opts_); }

 private:
  SolverOptions opts_;
};

class BarrierSolver final : public FeasibilitySolver {
 public:
  explicit BarrierSolver(SolverOptions o) : opts_(o) {}
  std::string_view name() const override { return "barrier"; }
  FeasOutcome solve(const ConicProblem& p) const override { return solve_barrier(p, opts_); }

 private:
  SolverOptions opts_;
};

}  // namespace

std::unique_ptr<FeasibilitySolver> make_solver(std::string_view name, const SolverOptions& opts) {
  if (name == "projection") return std::make_unique<ProjectionSolver>(opts);
  if (name == "barrier") return std::make_unique<BarrierSolver>(opts);
  throw Error("unknown feasibility solver '" + std::string(name) + "'");
}

}  // namespace dqcp

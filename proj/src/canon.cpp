#include "dqcp/canon.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <unordered_map>

#include "dqcp/atom.hpp"
#include "dqcp/error.hpp"

namespace dqcp {
namespace {

Expr cst(double v) { return make_constant(v); }

class Emitter {
 public:
  explicit Emitter(const CanonOptions& o) : opts_(o) {}

  ConstraintSet sublevel(const Expr& e, double t) {
    path_.push_back(label(e));
    ConstraintSet s = level(e, t, true);
    path_.pop_back();
    return s;
  }

  ConstraintSet superlevel(const Expr& e, double t) {
    path_.push_back(label(e));
    ConstraintSet s = level(e, t, false);
    path_.pop_back();
    return s;
  }

 private:
  static std::string label(const Expr& e) {
    if (e.is_atom()) return std::string(e.atom().name());
    return to_string(e);
  }

  std::string where() const {
    std::string out;
    for (const auto& p : path_) out += (out.empty() ? "" : " > ") + p;
    return out;
  }

  const CurvatureFlags& flags(const Expr& e) {
    auto it = memo_.find(e.node_id());
    if (it == memo_.end()) it = memo_.emplace(e.node_id(), curvature_of(e)).first;
    return it->second;
  }

  // upper = true: {e ≤ t}; otherwise {e ≥ t}.
  ConstraintSet level(const Expr& e, double t, bool upper) {
    const char* rel = upper ? "<=" : ">=";
    if (e.is_constant()) {
      const Value v = constant_value(e);
      const bool ok = upper ? v.maxCoeff() <= t : v.minCoeff() >= t;
      if (ok) return ConstraintSet::none();
      std::ostringstream why;
      why << std::setprecision(12) << "constant " << (upper ? v.maxCoeff() : v.minCoeff()) << " " << rel << " " << t
          << " fails";
      return ConstraintSet::never(why.str());
    }
    const Sign sg = e.sign();
    if (upper ? (is_positive(sg) ? t <= 0 : is_nonneg(sg) && t < 0)
              : (is_negative(sg) ? t >= 0 : is_nonpos(sg) && t > 0)) {
      std::ostringstream why;
      why << std::setprecision(12) << to_string(e) << " is " << to_string(sg) << ", never " << rel << " " << t;
      return ConstraintSet::never(why.str());
    }
    const CurvatureFlags& f = flags(e);
    if (upper ? f.is_convex : f.is_concave) {
      ConstraintSet s;
      s.add(upper ? dcp_le(e, cst(t)) : dcp_ge(e, cst(t)));
      return s;
    }
    if (!e.is_atom()) throw NoRepresentationError(where() + ": no representation");

    const Atom& atom = e.atom();
    const AtomArgs a{e.children(), e.params()};
    const std::string_view name = atom.name();
    const bool is_max = name == "maximum" || name == "max";
    const bool is_min = name == "minimum" || name == "min";
    if (e.shape().is_scalar() && ((upper && is_max) || (!upper && is_min))) {
      ConstraintSet s;
      for (const auto& ch : e.children()) {
        s.append(upper ? sublevel(ch, t) : superlevel(ch, t));
        if (s.infeasible) break;
      }
      return s;
    }

    if (e.shape().is_scalar()) {
      int free_arg = -1, free_count = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a.is_constant(i)) {
          free_arg = static_cast<int>(i);
          ++free_count;
        }
      }
      if (free_count == 1 && a[static_cast<std::size_t>(free_arg)].shape().is_scalar()) {
        const auto i = static_cast<std::size_t>(free_arg);
        const auto pre = upper ? atom.sublevel_preimage(a, i, t, opts_) : atom.superlevel_preimage(a, i, t, opts_);
        if (pre) return preimage(a[i], *pre);
      }
    }

    if (atom.analysis_only()) {
      throw NoRepresentationError(where() + ": " + std::string(name) +
                                  " is analysis-only; its level sets have no conic representation");
    }
    if (upper ? atom.has_sublevel() : atom.has_superlevel()) {
      try {
        return upper ? atom.sublevel(a, t, opts_) : atom.superlevel(a, t, opts_);
      } catch (const NoRepresentationError& err) {
        throw NoRepresentationError(where() + ": " + err.what());
      }
    }
    throw NoRepresentationError(where() + ": no " + (upper ? "sublevel" : "superlevel") + " representation for " +
                                std::string(name));
  }

  ConstraintSet preimage(const Expr& arg, const Preimage& p) {
    if (p.empty) return ConstraintSet::never(where() + ": level set is empty");
    const Sign s = arg.sign();
    ConstraintSet out;
    const bool need_hi = std::isfinite(p.upper) && !(p.upper >= 0 && is_nonpos(s));
    const bool need_lo = std::isfinite(p.lower) && !(p.lower <= 0 && is_nonneg(s));
    const CurvatureFlags& f = flags(arg);
    if (need_hi && !f.is_quasiconvex) {
      throw NoRepresentationError(where() + ": bounding the argument from above needs it quasiconvex, it is " +
                                  f.str());
    }
    if (need_lo && !f.is_quasiconcave) {
      throw NoRepresentationError(where() + ": bounding the argument from below needs it quasiconcave, it is " +
                                  f.str());
    }
    if (need_hi) out.append(sublevel(arg, p.upper));
    if (need_lo && !out.infeasible) out.append(superlevel(arg, p.lower));
    return out;
  }

  CanonOptions opts_;
  std::vector<std::string> path_;
  std::unordered_map<const void*, CurvatureFlags> memo_;
};

enum class Dir { exact, upper, lower };

Dir flip(Dir d) { return d == Dir::upper ? Dir::lower : d == Dir::lower ? Dir::upper : Dir::exact; }

Dir child_dir(Dir d, Monotonicity m) {
  if (d == Dir::exact) return Dir::exact;
  switch (m) {
    case Monotonicity::nondecreasing: return d;
    case Monotonicity::nonincreasing: return flip(d);
    case Monotonicity::none: return Dir::exact;
  }
  return Dir::exact;
}

class Lowering {
 public:
  explicit Lowering(const CanonOptions& o) : opts_(o) {}

  void add_variable(const Expr& v) {
    const VariableInfo& info = v.variable();
    if (vars_.count(info.name)) return;
    const AffineArray x = b_.add_variable(info);
    vars_.emplace(info.name, x);
    const double d = opts_.strict_margin;
    std::vector<LinExpr> rows;
    switch (info.sign) {
      case Sign::positive:
        for (const auto& e : x.entries) rows.push_back(e - LinExpr::of_constant(d));
        break;
      case Sign::nonnegative:
        rows = x.entries;
        break;
      case Sign::negative:
        for (const auto& e : x.entries) rows.push_back((-1.0 * e) - LinExpr::of_constant(d));
        break;
      case Sign::nonpositive:
        for (const auto& e : x.entries) rows.push_back(-1.0 * e);
        break;
      case Sign::zero:
        b_.add_zero(x.entries, info.name + ".sign");
        break;
      case Sign::unknown:
        break;
    }
    b_.add_nonneg(std::move(rows), info.name + ".sign");
    if (info.psd) b_.add_psd(x, info.name + ".psd");
  }

  void add(const DcpConstraint& c) {
    const std::string text = to_string(c);
    switch (c.kind) {
      case DcpConstraint::Kind::le: {
        const AffineArray l = lower(c.lhs, Dir::upper);
        const AffineArray r = lower(c.rhs, Dir::lower);
        b_.add_nonneg(difference(r, l), text);
        break;
      }
      case DcpConstraint::Kind::eq: {
        const AffineArray l = lower(c.lhs, Dir::exact);
        const AffineArray r = lower(c.rhs, Dir::exact);
        b_.add_zero(difference(r, l), text);
        break;
      }
      case DcpConstraint::Kind::psd:
        b_.add_psd(lower(c.lhs, Dir::exact), text);
        break;
    }
  }

  ConicBuilder& builder() { return b_; }

 private:
  static std::vector<LinExpr> difference(const AffineArray& r, const AffineArray& l) {
    if (r.size() != l.size() && r.size() != 1 && l.size() != 1) {
      throw ShapeError("constraint sides have shapes " + l.shape.str() + " and " + r.shape.str());
    }
    const int n = std::max(r.size(), l.size());
    std::vector<LinExpr> rows;
    for (int k = 0; k < n; ++k) rows.push_back(r.bcast(k) - l.bcast(k));
    return rows;
  }

  AffineArray lower(const Expr& e, Dir d) {
    if (e.is_constant()) return AffineArray::constant(constant_value(e), e.shape());
    if (e.is_variable()) {
      add_variable(e);
      return vars_.at(e.variable().name);
    }
    const Atom& atom = e.atom();
    const AtomArgs a{e.children(), e.params()};
    const std::string name(atom.name());

    if (atom.is_linear(a)) {
      std::vector<AffineArray> kids;
      for (std::size_t i = 0; i < a.size(); ++i) kids.push_back(lower(a[i], child_dir(d, atom.monotonicity(a, i))));
      return atom.lower_linear(a, kids);
    }

    if (d == Dir::exact) throw UnsupportedAtomError(name + " is not affine and cannot appear in an equality");
    const bool epi = d == Dir::upper;
    const CurvatureFlags f = atom.curvature(a).flags;
    if (epi ? !f.is_convex : !f.is_concave) {
      throw UnsupportedAtomError(name + " is not " + (epi ? "convex" : "concave") + " here and cannot be bounded " +
                                 (epi ? "above" : "below"));
    }
    if (!atom.has_graph()) throw UnsupportedAtomError(name + " has no graph implementation");

    const AffineArray out = b_.new_aux(e.shape(), name);
    std::vector<AffineArray> kids;
    for (std::size_t i = 0; i < a.size(); ++i) {
      kids.push_back(lower(a[i], child_dir(epi ? Dir::upper : Dir::lower, atom.monotonicity(a, i))));
    }
    atom.graph(b_, a, kids, out, epi);

    std::vector<long> params(a.params.begin(), a.params.end());
    b_.add_witness([&atom, kids, params, out](std::vector<double>& x) {
      std::vector<Value> vals;
      for (const auto& k : kids) vals.push_back(k.evaluate(x));
      const Value v = atom.evaluate(vals, params, EvalOptions{1e-9});
      for (int k = 0; k < out.size(); ++k) x[static_cast<std::size_t>(out[k].terms.front().first)] = flat(v, k);
    });
    return out;
  }

  CanonOptions opts_;
  ConicBuilder b_;
  std::unordered_map<std::string, AffineArray> vars_;
};

double min_value(const Expr& e) { return constant_value(e).minCoeff(); }
double max_value(const Expr& e) { return constant_value(e).maxCoeff(); }

}  // namespace

ConstraintSet emit_sublevel(const Expr& e, double t, const CanonOptions& o) { return Emitter(o).sublevel(e, t); }
ConstraintSet emit_superlevel(const Expr& e, double t, const CanonOptions& o) { return Emitter(o).superlevel(e, t); }

ConicProblem dcp_to_conic(const ConstraintSet& constraints, std::span<const Expr> variables, const CanonOptions& o) {
  Lowering low(o);
  for (const auto& v : variables) low.add_variable(v);
  if (constraints.infeasible) {
    low.builder().mark_infeasible(constraints.reason);
  } else {
    for (const auto& c : constraints.items) low.add(c);
  }
  return std::move(low.builder()).finish();
}

ConstraintSet canonicalize_constraint(const Constraint& c, const CanonOptions& o) {
  if (c.op == Relop::eq) {
    ConstraintSet s;
    s.add(dcp_eq(c.lhs, c.rhs));
    return s;
  }
  const Expr& small = c.op == Relop::le ? c.lhs : c.rhs;
  const Expr& big = c.op == Relop::le ? c.rhs : c.lhs;
  const CurvatureFlags sf = curvature_of(small), bf = curvature_of(big);
  if (sf.is_convex && bf.is_concave) {
    ConstraintSet s;
    s.add(dcp_le(small, big));
    return s;
  }
  if (sf.is_quasiconvex && big.is_constant()) return emit_sublevel(small, min_value(big), o);
  if (bf.is_quasiconcave && small.is_constant()) return emit_superlevel(big, max_value(small), o);
  throw VerificationError("constraint " + to_string(c) + " is not DQCP");
}

FeasibilityFamily::FeasibilityFamily(Problem problem, const CanonOptions& o)
    : problem_(std::move(problem)),
      opts_(o),
      objective_(problem_.sense() == Sense::maximize ? ops::neg(problem_.objective()) : problem_.objective()),
      integer_(is_integer_valued(objective_)) {
  for (const auto& c : problem_.constraints()) {
    base_.append(canonicalize_constraint(c, opts_));
    if (base_.infeasible) break;
  }
}

ConstraintSet FeasibilityFamily::constraints_at(double t) const {
  ConstraintSet s = base_;
  if (!s.infeasible) s.append(emit_sublevel(objective_, t, opts_));
  return s;
}

ConicProblem FeasibilityFamily::generate(double t) const {
  return dcp_to_conic(constraints_at(t), problem_.variables(), opts_);
}

ConicProblem FeasibilityFamily::base() const { return dcp_to_conic(base_, problem_.variables(), opts_); }

double FeasibilityFamily::objective_value(const Assignment& x, const EvalOptions& e) const {
  return eval_scalar(objective_, x, e);
}

FeasibilityFamily dqcp2dcp(const Problem& p, const CanonOptions& o) {
  const ProblemReport r = verify(p);
  if (!r.dqcp) {
    std::string msg = "problem is not DQCP";
    for (const auto& issue : r.issues) msg += "\n  " + issue;
    msg += "\nobjective certificate:\n" + format_certificate(r.objective);
    throw VerificationError(msg);
  }
  return FeasibilityFamily(p, o);
}

std::string format_conic(const ConicProblem& p) {
  std::ostringstream out;
  out << std::setprecision(12);
  out << "variables: " << p.num_vars << " coordinates, " << p.num_rows() << " rows\n";
  if (p.trivially_infeasible) out << "trivially infeasible: " << p.infeasible_reason << "\n";
  for (const auto& v : p.variables) {
    out << (v.aux ? "  aux " : "  var ") << v.name << " " << v.shape.str() << " ->";
    for (int c : v.coords) out << " x" << c;
    out << "\n";
  }
  for (const auto& blk : p.blocks) {
    out << "block " << blk.cone.str() << " rows " << blk.offset << ".." << blk.offset + blk.cone.dim - 1 << "  ["
        << blk.label << "]\n";
    for (int r = blk.offset; r < blk.offset + blk.cone.dim; ++r) {
      out << "  ";
      bool first = true;
      for (int j = 0; j < p.num_vars; ++j) {
        const double c = p.A(r, j);
        if (c == 0.0) continue;
        out << (first ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + "));
        if (std::abs(c) != 1.0) out << std::abs(c) << "*";
        out << "x" << j;
        first = false;
      }
      const double b = p.b(r);
      if (first) {
        out << b;
      } else if (b != 0.0) {
        out << (b < 0 ? " - " : " + ") << std::abs(b);
      }
      out << "\n";
    }
  }
  return out.str();
}

}  // namespace dqcp

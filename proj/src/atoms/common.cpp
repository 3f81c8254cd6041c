#include "common.hpp"

#include <algorithm>

namespace dqcp::atoms {

Sign sign_from(bool neg, bool zero, bool pos) {
  if (neg && pos) return Sign::unknown;
  if (neg) return zero ? Sign::nonpositive : Sign::negative;
  if (pos) return zero ? Sign::nonnegative : Sign::positive;
  return Sign::zero;
}

Sign sign_abs(Sign s) { return sign_from(false, may_be_zero(s), may_be_negative(s) || may_be_positive(s)); }

Sign sign_max(Sign a, Sign b) {
  const bool pos = may_be_positive(a) || may_be_positive(b);
  const bool zero = (may_be_zero(a) && !is_positive(b)) || (may_be_zero(b) && !is_positive(a));
  const bool neg = may_be_negative(a) && may_be_negative(b);
  return sign_from(neg, zero, pos);
}

Sign sign_min(Sign a, Sign b) { return sign_negate(sign_max(sign_negate(a), sign_negate(b))); }

Monotonicity mono_even(Sign s) {
  if (is_nonneg(s)) return Monotonicity::nondecreasing;
  if (is_nonpos(s)) return Monotonicity::nonincreasing;
  return Monotonicity::none;
}

Monotonicity mono_times(Sign s) { return mono_even(s); }

void shape_fail(std::string_view atom, const std::string& msg) {
  throw ShapeError(std::string(atom) + ": " + msg);
}

Shape broadcast_all(std::string_view atom, std::span<const Expr> args) {
  Shape s = args[0].shape();
  for (std::size_t i = 1; i < args.size(); ++i) {
    try {
      s = broadcast(s, args[i].shape());
    } catch (const ShapeError&) {
      shape_fail(atom, "incompatible shapes " + s.str() + " and " + args[i].shape().str());
    }
  }
  return s;
}

void require_scalar(std::string_view atom, const Expr& e, const char* what) {
  if (!e.shape().is_scalar()) shape_fail(atom, std::string(what) + " must be scalar, got " + e.shape().str());
}

void require_constant(std::string_view atom, const AtomArgs& a, std::size_t i) {
  if (!a.is_constant(i)) shape_fail(atom, "argument " + std::to_string(i) + " must be constant");
}

Value map_values(const Value& v, const std::function<double(double)>& f) { return v.unaryExpr(f); }

Value zip_values(const Value& a, const Value& b, const std::function<double(double, double)>& f) {
  const Eigen::Index r = std::max(a.rows(), b.rows()), c = std::max(a.cols(), b.cols());
  Value out(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < c; ++j) {
      const double x = a.size() == 1 ? a(0, 0) : a(i, j);
      const double y = b.size() == 1 ? b(0, 0) : b(i, j);
      out(i, j) = f(x, y);
    }
  }
  return out;
}

double eval_lin(const LinExpr& e, const std::vector<double>& x) { return e.evaluate(x); }

std::function<double(const std::vector<double>&)> lin_eval_fn(const LinExpr& e) {
  return [e](const std::vector<double>& x) { return e.evaluate(x); };
}

void witness_elementwise(ConicBuilder& b, const AffineArray& out, std::vector<const AffineArray*> args,
                         std::function<double(std::span<const double>)> f) {
  std::vector<AffineArray> copies;
  for (const auto* a : args) copies.push_back(*a);
  b.add_witness([out, copies = std::move(copies), f = std::move(f)](std::vector<double>& x) {
    std::vector<double> vals(copies.size());
    for (int k = 0; k < out.size(); ++k) {
      for (std::size_t i = 0; i < copies.size(); ++i) vals[i] = copies[i].bcast(k).evaluate(x);
      const double v = f(vals);
      // Auxiliary entries are plain coordinates.
      x[static_cast<std::size_t>(out[k].terms.front().first)] = v;
    }
  });
}

Expr cst(double v) { return make_constant(v); }

Expr scaled(double c, const Expr& e) { return apply_atom("scale", {make_constant(c), e}); }

Expr sum_exprs(std::vector<Expr> terms) {
  if (terms.size() == 1) return terms.front();
  return apply_atom("add", std::move(terms));
}

Expr negated(const Expr& e) { return apply_atom("neg", {e}); }

double odd_root(double t, long p) {
  const double r = std::pow(std::abs(t), 1.0 / static_cast<double>(p));
  return t < 0 ? -r : r;
}

}  // namespace dqcp::atoms

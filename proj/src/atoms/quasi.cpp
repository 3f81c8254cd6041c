#include "common.hpp"
#include "dqcp/jacobi.hpp"

namespace dqcp::atoms {
namespace {

bool strict_sign(Sign s) { return is_positive(s) || is_negative(s); }

// x·y. Affine when either factor is constant; otherwise quasiconcave on
// R²₊ and R²₋, quasiconvex when the factors have opposite signs.
class Product final : public Atom {
 public:
  std::string_view name() const override { return "product"; }
  int min_args() const override { return 2; }
  int max_args() const override { return 2; }
  Shape shape(const AtomArgs& a) const override { return broadcast_all(name(), a.args); }
  Sign sign(const AtomArgs& a) const override { return sign_mul(a.sign(0), a.sign(1)); }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (a.is_constant(0) || a.is_constant(1)) return {CurvatureFlags::affine(), ""};
    if (!a[0].shape().is_scalar() || !a[1].shape().is_scalar()) {
      return {CurvatureFlags::unknown(), "product of two non-constant factors must be scalar"};
    }
    const Sign x = a.sign(0), y = a.sign(1);
    CurvatureFlags f;
    if ((is_nonneg(x) && is_nonneg(y)) || (is_nonpos(x) && is_nonpos(y))) f.is_quasiconcave = true;
    if ((is_nonneg(x) && is_nonpos(y)) || (is_nonpos(x) && is_nonneg(y))) f.is_quasiconvex = true;
    if (!f.any()) return {f, "both factors need known signs (nonnegative or nonpositive)"};
    return {f, ""};
  }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t i) const override { return mono_times(a.sign(1 - i)); }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return zip_values(v[0], v[1], [](double x, double y) { return x * y; });
  }
  bool is_linear(const AtomArgs& a) const override { return a.is_constant(0) || a.is_constant(1); }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    const std::size_t ci = a.is_constant(0) ? 0 : 1;
    const Value c = a.constant(ci);
    const AffineArray& other = args[1 - ci];
    AffineArray out = AffineArray::zeros(shape(a));
    for (int k = 0; k < out.size(); ++k) {
      out[k] = other.bcast(k);
      out[k].scale_by(c.size() == 1 ? c(0, 0) : flat(c, k));
    }
    return out;
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                            const CanonOptions&) const override {
    const double c = a.scalar_constant(1 - i);
    if (c > 0) return Preimage::at_most(t / c);
    if (c < 0) return Preimage::at_least(t / c);
    return t >= 0 ? Preimage::everything() : Preimage::nothing();
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                              const CanonOptions&) const override {
    const double c = a.scalar_constant(1 - i);
    if (c > 0) return Preimage::at_least(t / c);
    if (c < 0) return Preimage::at_most(t / c);
    return t <= 0 ? Preimage::everything() : Preimage::nothing();
  }

  bool has_sublevel() const override { return true; }
  bool has_superlevel() const override { return true; }
  // x ≥ 0 ≥ y: xy ≤ t ⟺ x·(-y) ≥ -t.
  ConstraintSet sublevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    const Sign x = a.sign(0), y = a.sign(1);
    const bool xy = is_nonneg(x) && is_nonpos(y);
    const bool yx = is_nonpos(x) && is_nonneg(y);
    if (!xy && !yx) throw NoRepresentationError("product: sublevel sets need factors of opposite signs");
    if (t >= 0) return ConstraintSet::none();
    ConstraintSet s;
    const Expr p = xy ? apply_atom("geo_mean", {a[0], negated(a[1])}) : apply_atom("geo_mean", {negated(a[0]), a[1]});
    s.add(dcp_ge(p, cst(std::sqrt(-t))));
    return s;
  }
  // xy ≥ t on R²₊: sqrt(x·y) ≥ √t; on R²₋ use (-x)(-y).
  ConstraintSet superlevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    const Sign x = a.sign(0), y = a.sign(1);
    const bool pos = is_nonneg(x) && is_nonneg(y);
    const bool neg = is_nonpos(x) && is_nonpos(y);
    if (!pos && !neg) throw NoRepresentationError("product: superlevel sets need factors of equal signs");
    if (t <= 0) return ConstraintSet::none();
    ConstraintSet s;
    const Expr p = pos ? apply_atom("geo_mean", {a[0], a[1]}) : apply_atom("geo_mean", {negated(a[0]), negated(a[1])});
    s.add(dcp_ge(p, cst(std::sqrt(t))));
    return s;
  }
};

// x / y. Affine for a constant denominator; quasilinear when the
// denominator is strictly positive or strictly negative.
class Ratio final : public Atom {
 public:
  std::string_view name() const override { return "ratio"; }
  int min_args() const override { return 2; }
  int max_args() const override { return 2; }
  Shape shape(const AtomArgs& a) const override {
    const Shape s = broadcast_all(name(), a.args);
    if (a.is_constant(1) && (a.constant(1).array() == 0.0).any()) throw DomainError("ratio: division by zero");
    return s;
  }
  Sign sign(const AtomArgs& a) const override { return sign_div(a.sign(0), a.sign(1)); }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (a.is_constant(1)) return {CurvatureFlags::affine(), ""};
    if (!a[0].shape().is_scalar() || !a[1].shape().is_scalar()) {
      return {CurvatureFlags::unknown(), "ratio with a non-constant denominator must be scalar"};
    }
    if (!strict_sign(a.sign(1))) {
      return {CurvatureFlags::unknown(), "denominator must be positive or negative, is " +
                                             std::string(to_string(a.sign(1)))};
    }
    return {CurvatureFlags::quasilinear(), ""};
  }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t i) const override {
    const Sign y = a.sign(1);
    if (!strict_sign(y)) return Monotonicity::none;
    if (i == 0) return is_positive(y) ? Monotonicity::nondecreasing : Monotonicity::nonincreasing;
    const Sign x = a.sign(0);
    if (is_nonneg(x)) return Monotonicity::nonincreasing;
    if (is_nonpos(x)) return Monotonicity::nondecreasing;
    return Monotonicity::none;
  }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return zip_values(v[0], v[1], [](double x, double y) {
      if (y == 0.0) throw DomainError("ratio: division by zero");
      return x / y;
    });
  }
  bool is_linear(const AtomArgs& a) const override { return a.is_constant(1); }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    const Value c = a.constant(1);
    AffineArray out = AffineArray::zeros(shape(a));
    for (int k = 0; k < out.size(); ++k) {
      out[k] = args[0].bcast(k);
      out[k].scale_by(1.0 / (c.size() == 1 ? c(0, 0) : flat(c, k)));
    }
    return out;
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                            const CanonOptions&) const override {
    if (i != 0 || !a.is_constant(1)) return std::nullopt;
    const double c = a.scalar_constant(1);
    return c > 0 ? Preimage::at_most(t * c) : Preimage::at_least(t * c);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                              const CanonOptions&) const override {
    if (i != 0 || !a.is_constant(1)) return std::nullopt;
    const double c = a.scalar_constant(1);
    return c > 0 ? Preimage::at_least(t * c) : Preimage::at_most(t * c);
  }

  bool has_sublevel() const override { return true; }
  bool has_superlevel() const override { return true; }
  ConstraintSet sublevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    return level(a, t, true);
  }
  ConstraintSet superlevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    return level(a, t, false);
  }

 private:
  // x/y ≤ t ⟺ x ≤ t·y for y > 0 and x ≥ t·y for y < 0; shortcuts when the
  // sign of the ratio already decides the comparison with t.
  static ConstraintSet level(const AtomArgs& a, double t, bool below) {
    const Sign y = a.sign(1);
    if (!strict_sign(y)) throw NoRepresentationError("ratio: denominator sign must be strict");
    const Sign r = sign_div(a.sign(0), y);
    if (below) {
      if (is_nonneg(r) && t < 0) return ConstraintSet::never("ratio is nonnegative, level " + std::to_string(t));
      if (is_nonpos(r) && t >= 0) return ConstraintSet::none();
    } else {
      if (is_nonpos(r) && t > 0) return ConstraintSet::never("ratio is nonpositive, level " + std::to_string(t));
      if (is_nonneg(r) && t <= 0) return ConstraintSet::none();
    }
    ConstraintSet s;
    const Expr ty = scaled(t, a[1]);
    const bool x_small = below == is_positive(y);
    s.add(x_small ? dcp_le(a[0], ty) : dcp_ge(a[0], ty));
    return s;
  }
};

// ‖x − a‖₂ / ‖x − b‖₂ for constant a ≠ b, on the halfspace where it is ≤ 1.
class DistRatio final : public Atom {
 public:
  std::string_view name() const override { return "dist_ratio"; }
  int min_args() const override { return 3; }
  int max_args() const override { return 3; }
  Shape shape(const AtomArgs& a) const override {
    require_constant(name(), a, 1);
    require_constant(name(), a, 2);
    if (a[1].shape() != a[0].shape() || a[2].shape() != a[0].shape()) {
      shape_fail(name(), "a and b must have the shape of x (" + a[0].shape().str() + ")");
    }
    if ((a.constant(1) - a.constant(2)).norm() == 0.0) throw DomainError("dist_ratio: a and b must differ");
    return Shape::scalar();
  }
  Sign sign(const AtomArgs&) const override { return Sign::nonnegative; }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::quasiconvex(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::none; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    const double den = (v[0] - v[2]).norm();
    if (den == 0.0) throw DomainError("dist_ratio: x equals b");
    return Value::Constant(1, 1, (v[0] - v[1]).norm() / den);
  }
  bool has_sublevel() const override { return true; }
  ConstraintSet sublevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    if (t < 0) return ConstraintSet::never("dist_ratio is nonnegative");
    const Value av = a.constant(1), bv = a.constant(2);
    const Shape::Kind kind = a[0].shape().kind;
    ConstraintSet s;
    if (t >= 1) {
      // ‖x − a‖ ≤ ‖x − b‖ ⟺ 2(b − a)ᵀx ≤ ‖b‖² − ‖a‖²
      const Expr w = make_constant(2.0 * (bv - av), kind);
      const Expr lhs = apply_atom("sum", {apply_atom("product", {w, a[0]})});
      s.add(dcp_le(lhs, cst(bv.squaredNorm() - av.squaredNorm())));
      return s;
    }
    const double t2 = t * t;
    const Value c = (av - t2 * bv) / (1.0 - t2);
    const double r2 = c.squaredNorm() - (av.squaredNorm() - t2 * bv.squaredNorm()) / (1.0 - t2);
    const Expr diff = apply_atom("add", {a[0], negated(make_constant(c, kind))});
    s.add(dcp_le(apply_atom("norm2", {diff}), cst(std::sqrt(std::max(r2, 0.0)))));
    return s;
  }
};

// Largest λ with A v = λ B v, for symmetric A and positive definite B.
class GenLambdaMax final : public Atom {
 public:
  std::string_view name() const override { return "gen_lambda_max"; }
  int min_args() const override { return 2; }
  int max_args() const override { return 2; }
  Shape shape(const AtomArgs& a) const override {
    if (!a[0].shape().is_square() || a[1].shape() != a[0].shape()) {
      shape_fail(name(), "arguments must be square matrices of equal order, got " + a[0].shape().str() +
                             " and " + a[1].shape().str());
    }
    return Shape::scalar();
  }
  Sign sign(const AtomArgs&) const override { return Sign::unknown; }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::quasiconvex(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::none; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, max_generalized_eigenvalue(v[0], v[1]));
  }
  bool has_sublevel() const override { return true; }
  // λmax(A, B) ≤ t ⟺ tB − A ⪰ 0, with B ⪰ δI and both symmetric.
  ConstraintSet sublevel(const AtomArgs& a, double t, const CanonOptions& o) const override {
    const int n = a[0].shape().rows;
    ConstraintSet s;
    s.add(dcp_psd(apply_atom("add", {scaled(t, a[1]), negated(a[0])})));
    const Expr delta = make_constant(o.psd_margin * Value::Identity(n, n), Shape::Kind::matrix);
    s.add(dcp_psd(apply_atom("add", {a[1], negated(delta)})));
    for (std::size_t m = 0; m < 2; ++m) {
      const Expr& e = a[m];
      if (e.is_variable() && e.variable().symmetric) continue;
      for (long i = 0; i < n; ++i) {
        for (long j = i + 1; j < n; ++j) {
          s.add(dcp_eq(apply_atom("index", {e}, {i, j}), apply_atom("index", {e}, {j, i})));
        }
      }
    }
    return s;
  }
};

// x^p for odd p ≥ 3.
class PowOdd final : public Atom {
 public:
  std::string_view name() const override { return "pow_odd"; }
  int min_params() const override { return 1; }
  int max_params() const override { return 1; }
  Shape shape(const AtomArgs& a) const override {
    const long p = a.params[0];
    if (p < 3 || p % 2 == 0) shape_fail(name(), "exponent must be odd and at least 3, got " + std::to_string(p));
    return a[0].shape();
  }
  Sign sign(const AtomArgs& a) const override { return a.sign(0); }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (!a[0].shape().is_scalar()) return {CurvatureFlags::unknown(), "quasi-curvature is defined for scalars only"};
    return {CurvatureFlags::quasilinear(), ""};
  }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long> p, const EvalOptions&) const override {
    const int e = static_cast<int>(p[0]);
    return map_values(v[0], [e](double x) { return std::pow(x, e); });
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t, double t,
                                            const CanonOptions&) const override {
    return Preimage::at_most(odd_root(t, a.params[0]));
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_least(odd_root(t, a.params[0]));
  }
};

}  // namespace

void register_quasi(std::vector<const Atom*>& out) {
  static const Product product;
  static const Ratio ratio;
  static const DistRatio dist_ratio;
  static const GenLambdaMax gen_lambda_max;
  static const PowOdd pow_odd;
  out.insert(out.end(), {&product, &ratio, &dist_ratio, &gen_lambda_max, &pow_odd});
}

}  // namespace dqcp::atoms

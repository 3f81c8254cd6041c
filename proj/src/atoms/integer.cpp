#include "common.hpp"

namespace dqcp::atoms {
namespace {

class Rounding final : public Atom {
 public:
  explicit Rounding(bool up) : up_(up) {}
  std::string_view name() const override { return up_ ? "ceil" : "floor"; }
  Shape shape(const AtomArgs& a) const override { return a[0].shape(); }
  Sign sign(const AtomArgs& a) const override {
    const Sign s = a.sign(0);
    // ceil maps (-1, 0) to 0, floor maps (0, 1) to 0.
    if (up_) return sign_from(may_be_negative(s), may_be_zero(s) || may_be_negative(s), may_be_positive(s));
    return sign_from(may_be_negative(s), may_be_zero(s) || may_be_positive(s), may_be_positive(s));
  }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (!a[0].shape().is_scalar()) return {CurvatureFlags::unknown(), "quasi-curvature is defined for scalars only"};
    return {CurvatureFlags::quasilinear(), ""};
  }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  bool integer_valued() const override { return true; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return map_values(v[0], [this](double x) { return up_ ? std::ceil(x) : std::floor(x); });
  }
  // ceil(v) ≤ t ⟺ v ≤ ⌊t⌋;  floor(v) ≤ t ⟺ v < ⌊t⌋ + 1.
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions& o) const override {
    return Preimage::at_most(up_ ? std::floor(t) : std::floor(t) + 1.0 - o.strict_margin);
  }
  // ceil(v) ≥ t ⟺ v > ⌈t⌉ − 1;  floor(v) ≥ t ⟺ v ≥ ⌈t⌉.
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions& o) const override {
    return Preimage::at_least(up_ ? std::ceil(t) - 1.0 + o.strict_margin : std::ceil(t));
  }

 private:
  bool up_;
};

// -1 for negative arguments, +1 otherwise.
class SignAtom final : public Atom {
 public:
  std::string_view name() const override { return "sign"; }
  Shape shape(const AtomArgs& a) const override { return a[0].shape(); }
  Sign sign(const AtomArgs& a) const override {
    const Sign s = a.sign(0);
    return sign_from(may_be_negative(s), false, may_be_zero(s) || may_be_positive(s));
  }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (!a[0].shape().is_scalar()) return {CurvatureFlags::unknown(), "quasi-curvature is defined for scalars only"};
    return {CurvatureFlags::quasilinear(), ""};
  }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  bool integer_valued() const override { return true; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return map_values(v[0], [](double x) { return x < 0 ? -1.0 : 1.0; });
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions& o) const override {
    if (t >= 1) return Preimage::everything();
    if (t >= -1) return Preimage::at_most(-o.strict_margin);
    return Preimage::nothing();
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    if (t <= -1) return Preimage::everything();
    if (t <= 1) return Preimage::at_least(0.0);
    return Preimage::nothing();
  }
};

// Largest 1-based index of a nonzero entry; 0 for the zero vector.
class Length final : public Atom {
 public:
  std::string_view name() const override { return "length"; }
  Shape shape(const AtomArgs& a) const override {
    if (a[0].shape().is_matrix()) shape_fail(name(), "argument must be a vector, got " + a[0].shape().str());
    return Shape::scalar();
  }
  Sign sign(const AtomArgs& a) const override {
    return is_positive(a.sign(0)) || is_negative(a.sign(0)) ? Sign::positive : Sign::nonnegative;
  }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::quasiconvex(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::none; }
  bool integer_valued() const override { return true; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    int len = 0;
    for (int k = 0; k < static_cast<int>(v[0].size()); ++k) {
      if (flat(v[0], k) != 0.0) len = k + 1;
    }
    return Value::Constant(1, 1, len);
  }
  bool has_sublevel() const override { return true; }
  // length(x) ≤ t ⟺ x_i = 0 for every 1-based i > ⌊t⌋.
  ConstraintSet sublevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    if (t < 0) return ConstraintSet::never("length is nonnegative");
    const long n = a[0].shape().size();
    const double ft = std::floor(t);
    ConstraintSet s;
    for (long i = ft >= static_cast<double>(n) ? n : static_cast<long>(ft); i < n; ++i) {
      s.add(dcp_eq(apply_atom("index", {a[0]}, {i}), cst(0.0)));
    }
    return s;
  }
};

// 1 when |x| ≤ 1/2, else 0.
class Rectangle final : public Atom {
 public:
  std::string_view name() const override { return "rectangle"; }
  Shape shape(const AtomArgs& a) const override {
    require_scalar(name(), a[0], "argument");
    return Shape::scalar();
  }
  Sign sign(const AtomArgs&) const override { return Sign::nonnegative; }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::quasiconcave(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::none; }
  bool integer_valued() const override { return true; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, std::abs(v[0](0, 0)) <= 0.5 ? 1.0 : 0.0);
  }
  bool has_superlevel() const override { return true; }
  ConstraintSet superlevel(const AtomArgs& a, double t, const CanonOptions&) const override {
    if (t <= 0) return ConstraintSet::none();
    if (t > 1) return ConstraintSet::never("rectangle is at most 1");
    ConstraintSet s;
    s.add(dcp_le(a[0], cst(0.5)));
    s.add(dcp_ge(a[0], cst(-0.5)));
    return s;
  }
};

// Number of nonzero entries; quasiconcave on nonnegative vectors.
class Card final : public Atom {
 public:
  std::string_view name() const override { return "card"; }
  Shape shape(const AtomArgs&) const override { return Shape::scalar(); }
  Sign sign(const AtomArgs& a) const override {
    return is_positive(a.sign(0)) || is_negative(a.sign(0)) ? Sign::positive : Sign::nonnegative;
  }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (!is_nonneg(a.sign(0))) return {CurvatureFlags::unknown(), "argument must be nonnegative"};
    return {CurvatureFlags::quasiconcave(), ""};
  }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t) const override {
    return is_nonneg(a.sign(0)) ? Monotonicity::nondecreasing : Monotonicity::none;
  }
  bool integer_valued() const override { return true; }
  bool analysis_only() const override { return true; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, static_cast<double>((v[0].array() != 0.0).count()));
  }
};

// Matrix rank; quasiconcave on positive semidefinite matrices.
class Rank final : public Atom {
 public:
  std::string_view name() const override { return "rank"; }
  Shape shape(const AtomArgs& a) const override {
    if (!a[0].shape().is_matrix()) shape_fail(name(), "argument must be a matrix, got " + a[0].shape().str());
    return Shape::scalar();
  }
  Sign sign(const AtomArgs&) const override { return Sign::nonnegative; }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (a[0].is_variable() && a[0].variable().psd) return {CurvatureFlags::quasiconcave(), ""};
    return {CurvatureFlags::unknown(), "argument must be a positive semidefinite matrix variable"};
  }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::none; }
  bool integer_valued() const override { return true; }
  bool analysis_only() const override { return true; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v[0]);
    svd.setThreshold(1e-9);
    return Value::Constant(1, 1, static_cast<double>(svd.rank()));
  }
};

}  // namespace

void register_integer(std::vector<const Atom*>& out) {
  static const Rounding ceil(true);
  static const Rounding floor(false);
  static const SignAtom sign;
  static const Length length;
  static const Rectangle rectangle;
  static const Card card;
  static const Rank rank;
  out.insert(out.end(), {&ceil, &floor, &sign, &length, &rectangle, &card, &rank});
}

}  // namespace dqcp::atoms

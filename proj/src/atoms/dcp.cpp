#include <algorithm>
#include <limits>

#include "common.hpp"

namespace dqcp::atoms {
namespace {

constexpr double kSqrt2 = 1.4142135623730951;

LinExpr half() { return LinExpr::of_constant(0.5); }

class Unary : public Atom {
 public:
  Shape shape(const AtomArgs& a) const override { return a[0].shape(); }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions& o) const override {
    return map_values(v[0], [&](double x) { return apply(x, o); });
  }
  virtual double apply(double x, const EvalOptions& o) const = 0;
};

class Abs final : public Unary {
 public:
  std::string_view name() const override { return "abs"; }
  Sign sign(const AtomArgs& a) const override { return sign_abs(a.sign(0)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::convex(), ""}; }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t) const override { return mono_even(a.sign(0)); }
  double apply(double x, const EvalOptions&) const override { return std::abs(x); }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    std::vector<LinExpr> rows;
    for (int k = 0; k < out.size(); ++k) {
      rows.push_back(out[k] - args[0][k]);
      rows.push_back(out[k] + args[0][k]);
    }
    b.add_nonneg(std::move(rows), "abs");
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t, double t,
                                            const CanonOptions&) const override {
    if (mono_even(a.sign(0)) == Monotonicity::none) return std::nullopt;
    return t < 0 ? Preimage::nothing() : Preimage::between(-t, t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t, double t,
                                              const CanonOptions&) const override {
    const Monotonicity m = mono_even(a.sign(0));
    if (m == Monotonicity::none) return std::nullopt;
    if (t <= 0) return Preimage::everything();
    return m == Monotonicity::nondecreasing ? Preimage::at_least(t) : Preimage::at_most(-t);
  }
};

class Square final : public Unary {
 public:
  std::string_view name() const override { return "square"; }
  Sign sign(const AtomArgs& a) const override { return sign_abs(a.sign(0)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::convex(), ""}; }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t) const override { return mono_even(a.sign(0)); }
  double apply(double x, const EvalOptions&) const override { return x * x; }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    // 2·t·½ ≥ x²
    for (int k = 0; k < out.size(); ++k) b.add_rsoc({out[k], half(), args[0][k]}, "square");
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t, double t,
                                            const CanonOptions&) const override {
    if (mono_even(a.sign(0)) == Monotonicity::none) return std::nullopt;
    if (t < 0) return Preimage::nothing();
    return Preimage::between(-std::sqrt(t), std::sqrt(t));
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t, double t,
                                              const CanonOptions&) const override {
    const Monotonicity m = mono_even(a.sign(0));
    if (m == Monotonicity::none) return std::nullopt;
    if (t <= 0) return Preimage::everything();
    return m == Monotonicity::nondecreasing ? Preimage::at_least(std::sqrt(t)) : Preimage::at_most(-std::sqrt(t));
  }
};

class SumSquares final : public Atom {
 public:
  std::string_view name() const override { return "sum_squares"; }
  Shape shape(const AtomArgs&) const override { return Shape::scalar(); }
  Sign sign(const AtomArgs& a) const override { return sign_abs(a.sign(0)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::convex(), ""}; }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t) const override { return mono_even(a.sign(0)); }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, v[0].squaredNorm());
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    std::vector<LinExpr> rows{out[0], half()};
    rows.insert(rows.end(), args[0].entries.begin(), args[0].entries.end());
    b.add_rsoc(std::move(rows), "sum_squares");
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t, double t,
                                            const CanonOptions&) const override {
    if (mono_even(a.sign(0)) == Monotonicity::none) return std::nullopt;
    if (t < 0) return Preimage::nothing();
    return Preimage::between(-std::sqrt(t), std::sqrt(t));
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t, double t,
                                              const CanonOptions&) const override {
    const Monotonicity m = mono_even(a.sign(0));
    if (m == Monotonicity::none) return std::nullopt;
    if (t <= 0) return Preimage::everything();
    return m == Monotonicity::nondecreasing ? Preimage::at_least(std::sqrt(t)) : Preimage::at_most(-std::sqrt(t));
  }
};

class Norm2 final : public Atom {
 public:
  std::string_view name() const override { return "norm2"; }
  Shape shape(const AtomArgs&) const override { return Shape::scalar(); }
  Sign sign(const AtomArgs& a) const override { return sign_abs(a.sign(0)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::convex(), ""}; }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t) const override { return mono_even(a.sign(0)); }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, v[0].norm());
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    std::vector<LinExpr> rows{out[0]};
    rows.insert(rows.end(), args[0].entries.begin(), args[0].entries.end());
    b.add_soc(std::move(rows), "norm2");
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t, double t,
                                            const CanonOptions&) const override {
    if (mono_even(a.sign(0)) == Monotonicity::none) return std::nullopt;
    return t < 0 ? Preimage::nothing() : Preimage::between(-t, t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t, double t,
                                              const CanonOptions&) const override {
    const Monotonicity m = mono_even(a.sign(0));
    if (m == Monotonicity::none) return std::nullopt;
    if (t <= 0) return Preimage::everything();
    return m == Monotonicity::nondecreasing ? Preimage::at_least(t) : Preimage::at_most(-t);
  }
};

class Exp final : public Unary {
 public:
  std::string_view name() const override { return "exp"; }
  Sign sign(const AtomArgs&) const override { return Sign::positive; }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::convex(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  double apply(double x, const EvalOptions&) const override { return std::exp(x); }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    std::vector<LinExpr> ones(static_cast<std::size_t>(out.size()), LinExpr::of_constant(1.0));
    b.add_exp(args[0].entries, std::move(ones), out.entries, "exp");
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions&) const override {
    return t <= 0 ? Preimage::nothing() : Preimage::at_most(std::log(t));
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    return t <= 0 ? Preimage::everything() : Preimage::at_least(std::log(t));
  }
};

// Largest (smallest) entry of one argument.
class Extremum final : public Atom {
 public:
  explicit Extremum(bool is_max) : max_(is_max) {}
  std::string_view name() const override { return max_ ? "max" : "min"; }
  Shape shape(const AtomArgs&) const override { return Shape::scalar(); }
  Sign sign(const AtomArgs& a) const override { return a.sign(0); }
  AtomCurvature curvature(const AtomArgs&) const override {
    return {max_ ? CurvatureFlags::convex() : CurvatureFlags::concave(), ""};
  }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, max_ ? v[0].maxCoeff() : v[0].minCoeff());
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    std::vector<LinExpr> rows;
    for (const auto& e : args[0].entries) rows.push_back(max_ ? out[0] - e : e - out[0]);
    b.add_nonneg(std::move(rows), std::string(name()));
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions&) const override {
    return Preimage::at_most(t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_least(t);
  }

 private:
  bool max_;
};

// Elementwise maximum (minimum) of several expressions.
class ExtremumOf final : public Atom {
 public:
  explicit ExtremumOf(bool is_max) : max_(is_max) {}
  std::string_view name() const override { return max_ ? "maximum" : "minimum"; }
  int max_args() const override { return -1; }
  Shape shape(const AtomArgs& a) const override { return broadcast_all(name(), a.args); }
  Sign sign(const AtomArgs& a) const override {
    Sign s = a.sign(0);
    for (std::size_t i = 1; i < a.size(); ++i) s = max_ ? sign_max(s, a.sign(i)) : sign_min(s, a.sign(i));
    return s;
  }
  AtomCurvature curvature(const AtomArgs&) const override {
    return {max_ ? CurvatureFlags::convex() : CurvatureFlags::concave(), ""};
  }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    Value acc = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) {
      acc = zip_values(acc, v[i], [this](double x, double y) { return max_ ? std::max(x, y) : std::min(x, y); });
    }
    return acc;
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    std::vector<LinExpr> rows;
    for (const auto& arg : args) {
      for (int k = 0; k < out.size(); ++k) rows.push_back(max_ ? out[k] - arg.bcast(k) : arg.bcast(k) - out[k]);
    }
    b.add_nonneg(std::move(rows), std::string(name()));
  }
  // max(v, c...) ≤ t ⟺ v ≤ t when every constant is ≤ t.
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                            const CanonOptions&) const override {
    const double c = others(a, i);
    if (max_) return c > t ? Preimage::nothing() : Preimage::at_most(t);
    return c <= t ? Preimage::everything() : Preimage::at_most(t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                              const CanonOptions&) const override {
    const double c = others(a, i);
    if (max_) return c >= t ? Preimage::everything() : Preimage::at_least(t);
    return c < t ? Preimage::nothing() : Preimage::at_least(t);
  }

 private:
  double others(const AtomArgs& a, std::size_t i) const {
    double c = max_ ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (j == i) continue;
      const double v = a.scalar_constant(j);
      c = max_ ? std::max(c, v) : std::min(c, v);
    }
    return c;
  }
  bool max_;
};

class Sqrt final : public Unary {
 public:
  std::string_view name() const override { return "sqrt"; }
  Sign sign(const AtomArgs& a) const override {
    return is_positive(a.sign(0)) ? Sign::positive : Sign::nonnegative;
  }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::concave(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  double apply(double x, const EvalOptions& o) const override {
    if (x < 0) {
      if (x < -o.domain_tol) throw DomainError("sqrt of negative value " + std::to_string(x));
      x = 0;
    }
    return std::sqrt(x);
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    // t ≤ w, w² ≤ x
    const AffineArray w = b.new_aux(out.shape, "sqrt.w");
    std::vector<LinExpr> rows;
    for (int k = 0; k < out.size(); ++k) {
      b.add_rsoc({args[0][k], half(), w[k]}, "sqrt");
      rows.push_back(w[k] - out[k]);
    }
    b.add_nonneg(std::move(rows), "sqrt");
    witness_elementwise(b, w, {&args[0]}, [](std::span<const double> v) { return std::sqrt(std::max(v[0], 0.0)); });
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions&) const override {
    return t < 0 ? Preimage::nothing() : Preimage::between(0.0, t * t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_least(t <= 0 ? 0.0 : t * t);
  }
};

class Log final : public Unary {
 public:
  std::string_view name() const override { return "log"; }
  Sign sign(const AtomArgs&) const override { return Sign::unknown; }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::concave(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  double apply(double x, const EvalOptions&) const override {
    if (!(x > 0)) throw DomainError("log of nonpositive value " + std::to_string(x));
    return std::log(x);
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    // t ≤ log x ⟺ (t, 1, x) ∈ K_exp
    std::vector<LinExpr> ones(static_cast<std::size_t>(out.size()), LinExpr::of_constant(1.0));
    b.add_exp(out.entries, std::move(ones), args[0].entries, "log");
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions& o) const override {
    return Preimage::between(o.strict_margin, std::exp(t));
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_least(std::exp(t));
  }
};

// sqrt(x·y) on x, y ≥ 0.
class GeoMean final : public Atom {
 public:
  std::string_view name() const override { return "geo_mean"; }
  int min_args() const override { return 2; }
  int max_args() const override { return 2; }
  Shape shape(const AtomArgs& a) const override { return broadcast_all(name(), a.args); }
  Sign sign(const AtomArgs& a) const override {
    return is_positive(a.sign(0)) && is_positive(a.sign(1)) ? Sign::positive : Sign::nonnegative;
  }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::concave(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions& o) const override {
    return zip_values(v[0], v[1], [&](double x, double y) {
      if (x < -o.domain_tol || y < -o.domain_tol) throw DomainError("geo_mean of a negative value");
      return std::sqrt(std::max(x, 0.0) * std::max(y, 0.0));
    });
  }
  bool has_graph() const override { return true; }
  void graph(ConicBuilder& b, const AtomArgs&, std::span<const AffineArray> args, const AffineArray& out,
             bool) const override {
    // t ≤ s, 2·x·y ≥ (√2·s)²
    const AffineArray s = b.new_aux(out.shape, "geo_mean.s");
    std::vector<LinExpr> rows;
    for (int k = 0; k < out.size(); ++k) {
      b.add_rsoc({args[0].bcast(k), args[1].bcast(k), kSqrt2 * s[k]}, "geo_mean");
      rows.push_back(s[k] - out[k]);
    }
    b.add_nonneg(std::move(rows), "geo_mean");
    witness_elementwise(b, s, {&args[0], &args[1]}, [](std::span<const double> v) {
      return std::sqrt(std::max(v[0], 0.0) * std::max(v[1], 0.0));
    });
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                            const CanonOptions&) const override {
    const double c = a.scalar_constant(1 - i);
    if (t < 0 || c < 0) return Preimage::nothing();
    if (c == 0) return Preimage::at_least(0.0);
    return Preimage::between(0.0, t * t / c);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                              const CanonOptions&) const override {
    const double c = a.scalar_constant(1 - i);
    if (c < 0) return Preimage::nothing();
    if (t <= 0) return Preimage::at_least(0.0);
    if (c == 0) return Preimage::nothing();
    return Preimage::at_least(t * t / c);
  }
};

}  // namespace

void register_convex(std::vector<const Atom*>& out) {
  static const Abs abs;
  static const Square square;
  static const SumSquares sum_squares;
  static const Norm2 norm2;
  static const Exp exp;
  static const Extremum max(true);
  static const ExtremumOf maximum(true);
  out.insert(out.end(), {&abs, &square, &sum_squares, &norm2, &exp, &max, &maximum});
}

void register_concave(std::vector<const Atom*>& out) {
  static const Sqrt sqrt;
  static const Log log;
  static const Extremum min(false);
  static const ExtremumOf minimum(false);
  static const GeoMean geo_mean;
  out.insert(out.end(), {&sqrt, &log, &min, &minimum, &geo_mean});
}

}  // namespace dqcp::atoms

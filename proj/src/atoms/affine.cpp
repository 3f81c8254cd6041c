#include <numeric>

#include "common.hpp"

namespace dqcp::atoms {
namespace {

class Add final : public Atom {
 public:
  std::string_view name() const override { return "add"; }
  int max_args() const override { return -1; }
  Shape shape(const AtomArgs& a) const override { return broadcast_all(name(), a.args); }
  Sign sign(const AtomArgs& a) const override {
    Sign s = a.sign(0);
    for (std::size_t i = 1; i < a.size(); ++i) s = sign_add(s, a.sign(i));
    return s;
  }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    Value acc = v[0];
    for (std::size_t i = 1; i < v.size(); ++i) acc = zip_values(acc, v[i], [](double x, double y) { return x + y; });
    return acc;
  }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    AffineArray out = AffineArray::zeros(shape(a));
    for (const auto& arg : args) {
      for (int k = 0; k < out.size(); ++k) out[k].add(arg.bcast(k));
    }
    return out;
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                            const CanonOptions&) const override {
    return Preimage::at_most(t - others(a, i));
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_least(t - others(a, i));
  }

 private:
  static double others(const AtomArgs& a, std::size_t i) {
    double c = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
      if (j != i) c += a.scalar_constant(j);
    }
    return c;
  }
};

class Neg final : public Atom {
 public:
  std::string_view name() const override { return "neg"; }
  Shape shape(const AtomArgs& a) const override { return a[0].shape(); }
  Sign sign(const AtomArgs& a) const override { return sign_negate(a.sign(0)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nonincreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override { return -v[0]; }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs&, std::span<const AffineArray> args) const override {
    AffineArray out = args[0];
    for (auto& e : out.entries) e.scale_by(-1.0);
    return out;
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions&) const override {
    return Preimage::at_least(-t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_most(-t);
  }
};

// scale(c, e) = c·e for a constant scalar c.
class Scale final : public Atom {
 public:
  std::string_view name() const override { return "scale"; }
  int min_args() const override { return 2; }
  int max_args() const override { return 2; }
  Shape shape(const AtomArgs& a) const override {
    require_scalar(name(), a[0], "the factor");
    require_constant(name(), a, 0);
    return a[1].shape();
  }
  Sign sign(const AtomArgs& a) const override { return sign_mul(a.sign(0), a.sign(1)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t i) const override {
    return i == 1 ? mono_times(a.sign(0)) : Monotonicity::none;
  }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return v[0](0, 0) * v[1];
  }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    const double c = a.scalar_constant(0);
    AffineArray out = args[1];
    for (auto& e : out.entries) e.scale_by(c);
    return out;
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                            const CanonOptions&) const override {
    if (i != 1) return std::nullopt;
    const double c = a.scalar_constant(0);
    if (c > 0) return Preimage::at_most(t / c);
    if (c < 0) return Preimage::at_least(t / c);
    return t >= 0 ? Preimage::everything() : Preimage::nothing();
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs& a, std::size_t i, double t,
                                              const CanonOptions&) const override {
    if (i != 1) return std::nullopt;
    const double c = a.scalar_constant(0);
    if (c > 0) return Preimage::at_least(t / c);
    if (c < 0) return Preimage::at_most(t / c);
    return t <= 0 ? Preimage::everything() : Preimage::nothing();
  }
};

class Sum final : public Atom {
 public:
  std::string_view name() const override { return "sum"; }
  Shape shape(const AtomArgs&) const override { return Shape::scalar(); }
  Sign sign(const AtomArgs& a) const override { return sign_add(a.sign(0), a.sign(0)); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return Value::Constant(1, 1, v[0].sum());
  }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs&, std::span<const AffineArray> args) const override {
    AffineArray out = AffineArray::zeros(Shape::scalar());
    for (const auto& e : args[0].entries) out[0].add(e);
    return out;
  }
  std::optional<Preimage> sublevel_preimage(const AtomArgs&, std::size_t, double t,
                                            const CanonOptions&) const override {
    return Preimage::at_most(t);
  }
  std::optional<Preimage> superlevel_preimage(const AtomArgs&, std::size_t, double t,
                                              const CanonOptions&) const override {
    return Preimage::at_least(t);
  }
};

// index(e, i) for vectors and scalars, index(e, i, j) for matrices; 0-based.
class Index final : public Atom {
 public:
  std::string_view name() const override { return "index"; }
  int min_params() const override { return 1; }
  int max_params() const override { return 2; }
  Shape shape(const AtomArgs& a) const override {
    const Shape& s = a[0].shape();
    if (s.is_matrix()) {
      if (a.params.size() != 2) shape_fail(name(), "matrix arguments need a row and a column index");
      if (a.params[0] < 0 || a.params[0] >= s.rows || a.params[1] < 0 || a.params[1] >= s.cols) {
        shape_fail(name(), "index out of range for " + s.str());
      }
    } else {
      if (a.params.size() != 1) shape_fail(name(), "vector arguments need exactly one index");
      if (a.params[0] < 0 || a.params[0] >= s.size()) shape_fail(name(), "index out of range for " + s.str());
    }
    return Shape::scalar();
  }
  Sign sign(const AtomArgs& a) const override { return a.sign(0); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long> p, const EvalOptions&) const override {
    return Value::Constant(1, 1, flat(v[0], flat_index(v[0].cols(), p)));
  }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    AffineArray out = AffineArray::zeros(Shape::scalar());
    out[0] = args[0][flat_index(a[0].shape().cols, a.params)];
    return out;
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
  static int flat_index(Eigen::Index cols, std::span<const long> p) {
    return p.size() == 2 ? static_cast<int>(p[0] * cols + p[1]) : static_cast<int>(p[0]);
  }
};

// slice(e, start, stop): entries start..stop-1 of a vector.
class Slice final : public Atom {
 public:
  std::string_view name() const override { return "slice"; }
  int min_params() const override { return 2; }
  int max_params() const override { return 2; }
  Shape shape(const AtomArgs& a) const override {
    const Shape& s = a[0].shape();
    if (s.is_matrix()) shape_fail(name(), "argument must be a vector, got " + s.str());
    if (a.params[0] < 0 || a.params[0] >= a.params[1] || a.params[1] > s.size()) {
      shape_fail(name(), "bad range [" + std::to_string(a.params[0]) + ", " + std::to_string(a.params[1]) +
                             ") for " + s.str());
    }
    return Shape::vector(static_cast<int>(a.params[1] - a.params[0]));
  }
  Sign sign(const AtomArgs& a) const override { return a.sign(0); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long> p, const EvalOptions&) const override {
    return v[0].block(p[0], 0, p[1] - p[0], 1);
  }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    AffineArray out = AffineArray::zeros(shape(a));
    for (int k = 0; k < out.size(); ++k) out[k] = args[0][static_cast<int>(a.params[0]) + k];
    return out;
  }
};

// promote(e, n): the scalar e repeated n times.
class Promote final : public Atom {
 public:
  std::string_view name() const override { return "promote"; }
  int min_params() const override { return 1; }
  int max_params() const override { return 1; }
  Shape shape(const AtomArgs& a) const override {
    require_scalar(name(), a[0], "argument");
    if (a.params[0] < 1) shape_fail(name(), "length must be positive");
    return Shape::vector(static_cast<int>(a.params[0]));
  }
  Sign sign(const AtomArgs& a) const override { return a.sign(0); }
  AtomCurvature curvature(const AtomArgs&) const override { return {CurvatureFlags::affine(), ""}; }
  Monotonicity monotonicity(const AtomArgs&, std::size_t) const override { return Monotonicity::nondecreasing; }
  Value evaluate(std::span<const Value> v, std::span<const long> p, const EvalOptions&) const override {
    return Value::Constant(p[0], 1, v[0](0, 0));
  }
  bool is_linear(const AtomArgs&) const override { return true; }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    AffineArray out = AffineArray::zeros(shape(a));
    for (auto& e : out.entries) e = args[0][0];
    return out;
  }
};

// matmul(A, B), matrix product; affine when one operand is constant.
class Matmul final : public Atom {
 public:
  std::string_view name() const override { return "matmul"; }
  int min_args() const override { return 2; }
  int max_args() const override { return 2; }
  Shape shape(const AtomArgs& a) const override {
    const Shape& l = a[0].shape();
    const Shape& r = a[1].shape();
    if (!l.is_matrix()) shape_fail(name(), "left operand must be a matrix, got " + l.str());
    if (r.is_scalar() || l.cols != r.rows) shape_fail(name(), "cannot multiply " + l.str() + " by " + r.str());
    return r.is_vector() ? Shape::vector(l.rows) : Shape::matrix(l.rows, r.cols);
  }
  Sign sign(const AtomArgs& a) const override { return sign_mul(a.sign(0), a.sign(1)); }
  AtomCurvature curvature(const AtomArgs& a) const override {
    if (a.is_constant(0) || a.is_constant(1)) return {CurvatureFlags::affine(), ""};
    return {CurvatureFlags::unknown(), "one operand must be constant"};
  }
  Monotonicity monotonicity(const AtomArgs& a, std::size_t i) const override {
    const std::size_t other = 1 - i;
    if (!a.is_constant(other)) return Monotonicity::none;
    return mono_times(a.sign(other));
  }
  Value evaluate(std::span<const Value> v, std::span<const long>, const EvalOptions&) const override {
    return v[0] * v[1];
  }
  bool is_linear(const AtomArgs& a) const override { return a.is_constant(0) || a.is_constant(1); }
  AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const override {
    const Shape out_shape = shape(a);
    const Shape& l = a[0].shape();
    const int inner = l.cols;
    const int cols = a[1].shape().cols;
    AffineArray out = AffineArray::zeros(out_shape);
    const bool left_const = a.is_constant(0);
    const Value c = left_const ? a.constant(0) : a.constant(1);
    for (int i = 0; i < l.rows; ++i) {
      for (int j = 0; j < cols; ++j) {
        LinExpr& e = out[i * cols + j];
        for (int k = 0; k < inner; ++k) {
          if (left_const) e.add(args[1][k * cols + j], c(i, k));
          else e.add(args[0][i * inner + k], c(k, j));
        }
      }
    }
    return out;
  }
};

}  // namespace

void register_affine(std::vector<const Atom*>& out) {
  static const Add add;
  static const Neg neg;
  static const Scale scale;
  static const Sum sum;
  static const Index index;
  static const Slice slice;
  static const Promote promote;
  static const Matmul matmul;
  out.insert(out.end(), {&add, &neg, &scale, &sum, &index, &slice, &promote, &matmul});
}

}  // namespace dqcp::atoms

#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dqcp/atom.hpp"
#include "dqcp/cones.hpp"
#include "dqcp/error.hpp"
#include "dqcp/solver.hpp"

namespace dqcp::testing {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using namespace dqcp::ops;

double Rng::in_sign(Sign s, double scale) {
  const double mag = uniform(0.05, scale);
  switch (s) {
    case Sign::zero: return 0.0;
    case Sign::positive: return mag;
    case Sign::negative: return -mag;
    case Sign::nonnegative: return coin(0.1) ? 0.0 : mag;
    case Sign::nonpositive: return coin(0.1) ? 0.0 : -mag;
    case Sign::unknown: return uniform(-scale, scale);
  }
  return 0.0;
}

MatrixXd Rng::gaussian(int rows, int cols) {
  MatrixXd m(rows, cols);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) m(i, j) = normal();
  }
  return m;
}

MatrixXd Rng::symmetric(int n) {
  const MatrixXd g = gaussian(n, n);
  return 0.5 * (g + g.transpose());
}

MatrixXd Rng::spd(int n, double lo, double hi) {
  Eigen::HouseholderQR<MatrixXd> qr(gaussian(n, n));
  const MatrixXd q = qr.householderQ();
  VectorXd d(n);
  for (int i = 0; i < n; ++i) d(i) = uniform(lo, hi);
  return q * d.asDiagonal() * q.transpose();
}

bool member(const ConicProblem& p, const Assignment& x, double tol) {
  if (p.trivially_infeasible) return false;
  const std::vector<double> full = p.complete(x);
  return p.cone_distance(full) <= tol;
}

bool member(const ConstraintSet& s, const std::vector<Expr>& vars, const Assignment& x, const CanonOptions& o,
            double tol) {
  if (s.infeasible) return false;
  return member(dcp_to_conic(s, vars, o), x, tol);
}

void SuiteReport::fail(std::string what) {
  ++failures;
  if (notes.size() < 5) notes.push_back(std::move(what));
}

std::string SuiteReport::summary() const {
  std::ostringstream out;
  out << name << ": " << checks << " checks, " << failures << " failures";
  for (const auto& n : notes) out << "\n    " << n;
  return out.str();
}

// Fixtures -------------------------------------------------------------

Problem hello_world(bool y_positive) {
  const Expr x = make_variable("x");
  const Expr y = make_variable("y", Shape::scalar(), y_positive ? Sign::positive : Sign::unknown);
  const Expr objective = apply_atom("ratio", {neg(call("sqrt", x)), y});
  return Problem(Sense::minimize, objective, {{call("exp", x), Relop::le, y}});
}

GenEig gen_eig() {
  const Expr x = make_variable("X", Shape::matrix(3, 3));
  const Expr y = make_variable("Y", Shape::matrix(3, 3));
  const long omega[3][2] = {{0, 0}, {0, 2}, {1, 1}};
  const double xv[3] = {1.0, 1.9, 0.8};
  const double yv[3] = {3.0, 1.4, 0.2};
  std::vector<Constraint> cons;
  for (int k = 0; k < 3; ++k) {
    cons.push_back({apply_atom("index", {x}, {omega[k][0], omega[k][1]}), Relop::eq, make_constant(xv[k])});
    cons.push_back({apply_atom("index", {y}, {omega[k][0], omega[k][1]}), Relop::eq, make_constant(yv[k])});
  }
  return {x, y, Problem(Sense::minimize, call("gen_lambda_max", x, y), cons)};
}

namespace {

const double kMinLengthA[100] = {
    1.6243453636632417,   -0.6117564136500754,  -0.5281717522634557,  -1.0729686221561705,
    0.8654076293246785,   -2.3015386968802827,  1.74481176421648,     -0.7612069008951028,
    0.31903909605709857,  -0.2493703754774101,  1.462107937044974,    -2.060140709497654,
    -0.3224172040135075,  -0.38405435466841564, 1.1337694423354374,   -1.0998912673140309,
    -0.17242820755043575, -0.8778584179213718,  0.04221374671559283,  0.5828152137158222,
    -1.1006191772129212,  1.1447237098396141,   0.9015907205927955,   0.5024943389018682,
    0.9008559492644118,   -0.6837278591743331,  -0.12289022551864817, -0.9357694342590688,
    -0.2678880796260159,  0.530355466738186,    -0.691660751725309,   -0.39675352685597737,
    -0.6871727001195994,  -0.8452056414987196,  -0.671246130836819,   -0.01266459891890136,
    -1.1173103486352778,  0.23441569781709215,  1.6598021771098705,   0.7420441605773356,
    -0.19183555236161492, -0.8876289640848363,  -0.7471582937508376,  1.6924546010277466,
    0.05080775477602897,  -0.6369956465693534,  0.19091548466746602,  2.100255136478842,
    0.12015895248162915,  0.6172031097074192,   0.3001703199558275,   -0.35224984649351865,
    -1.1425181980221402,  -0.3493427224128775,  -0.2088942333747781,  0.5866231911821976,
    0.8389834138745049,   0.9311020813035573,   0.2855873252542588,   0.8851411642707281,
    -0.7543979409966528,  1.2528681552332879,   0.5129298204180088,   -0.29809283510271567,
    0.48851814653749703,  -0.07557171302105573, 1.131629387451427,    1.5198168164221988,
    2.1855754065331614,   -1.3964963354881377,  -1.4441138054295894,  -0.5044658629464512,
    0.16003706944783047,  0.8761689211162249,   0.31563494724160523,  -2.022201215824003,
    -0.3062040126283718,  0.8279746426072462,   0.2300947353643834,   0.7620111803120247,
    -0.22232814261035927, -0.20075806892999745, 0.1865613909882843,   0.4100516472082563,
    0.19829972012676975,  0.11900864580745882,  -0.6706622862890306,  0.3775637863209194,
    0.12182127099143693,  1.1294839079119197,   1.198917879901507,    0.18515641748394385,
    -0.3752849500901142,  -0.6387304074542224,  0.4234943540641129,   0.07734006834855942,
    -0.3438536755710756,  0.04359685683424694,  -0.6200008439481293,  0.6980320340722189};

const double kMinLengthB[10] = {-1.7377530856770464, -4.244855857163026,  2.3437768956482183,
                                -1.691383049869137,  -2.335016290248008,  -1.2196600111369442,
                                0.11499465845598955, -1.1282910326203817, -0.8770490282986296,
                                -1.3988946092188481};

}  // namespace

MinLength min_length() {
  MatrixXd a(10, 10);
  for (int k = 0; k < 100; ++k) a(k / 10, k % 10) = kMinLengthA[k];
  VectorXd b(10);
  for (int k = 0; k < 10; ++k) b(k) = kMinLengthB[k];
  const double eps = 1e-2;
  const Expr x = make_variable("x", Shape::vector(10));
  const Expr r = add({apply_atom("matmul", {make_constant(a, Shape::Kind::matrix), x}),
                      neg(make_constant(b, Shape::Kind::vector))});
  const Expr mse = scale(1.0 / 10.0, call("sum_squares", r));
  Problem p(Sense::minimize, call("length", x), {{mse, Relop::le, make_constant(eps)}});
  return {a, b, eps, x, std::move(p)};
}

int min_length_oracle(const MatrixXd& a, const VectorXd& b, double eps) {
  const auto n = a.cols();
  const double rows = static_cast<double>(a.rows());
  for (Eigen::Index j = 0; j <= n; ++j) {
    double mse;
    if (j == 0) {
      mse = b.squaredNorm() / rows;
    } else {
      const MatrixXd aj = a.leftCols(j);
      const VectorXd xj = aj.colPivHouseholderQr().solve(b);
      mse = (aj * xj - b).squaredNorm() / rows;
    }
    if (mse <= eps) return static_cast<int>(j);
  }
  return static_cast<int>(n) + 1;
}

// Curvature table ------------------------------------------------------

std::vector<CurvatureCase> curvature_table() {
  const Expr x = make_variable("x");
  const Expr y = make_variable("y");
  const Expr xp = make_variable("xp", Shape::scalar(), Sign::nonnegative);
  const Expr yp = make_variable("yp", Shape::scalar(), Sign::nonnegative);
  const Expr xn = make_variable("xn", Shape::scalar(), Sign::nonpositive);
  const Expr yn = make_variable("yn", Shape::scalar(), Sign::nonpositive);
  const Expr ypos = make_variable("ypos", Shape::scalar(), Sign::positive);
  const Expr yneg = make_variable("yneg", Shape::scalar(), Sign::negative);
  const Expr v = make_variable("v", Shape::vector(3));
  const Expr vp = make_variable("vp", Shape::vector(3), Sign::nonnegative);
  const Expr mx = make_variable("X", Shape::matrix(3, 3));
  const Expr my = make_variable("Y", Shape::matrix(3, 3));

  const Expr lin_num = add({call("sum", apply_atom("product", {make_constant({1.0, -2.0, 0.5}), vp})),
                            make_constant(1.0)});
  const Expr lin_den = add({call("sum", vp), make_constant(3.0)});
  const Expr lambda = call("gen_lambda_max", mx, my);
  const Expr a = make_constant({1.0, 0.0, 0.0});
  const Expr b = make_constant({-1.0, 2.0, 0.0});

  return {
      {"product on R2+ is quasiconcave", call("product", xp, yp), false, true},
      {"product on R2- is quasiconcave", call("product", xn, yn), false, true},
      {"product of opposite signs is quasiconvex", call("product", xp, yn), true, false},
      {"product with unknown signs is unknown", call("product", x, y), false, false},
      {"product of nonnegative concave functions is quasiconcave",
       call("product", call("sqrt", x), call("sqrt", y)), false, true},
      {"nonnegative concave times nonpositive convex is quasiconvex",
       call("product", call("sqrt", x), neg(call("sqrt", y))), true, false},
      {"ratio with positive denominator is quasilinear", call("ratio", x, ypos), true, true},
      {"ratio with negative denominator is quasilinear", call("ratio", x, yneg), true, true},
      {"ratio with unknown signs is unknown", call("ratio", x, y), false, false},
      {"nonnegative convex over positive concave is quasiconvex",
       call("ratio", call("square", x), apply_atom("minimum", {ypos, make_constant(1.0)})), true, false},
      {"nonnegative concave over positive convex is quasiconcave",
       call("ratio", call("sqrt", x), call("exp", y)), false, true},
      {"-sqrt(x)/y with positive y is quasiconvex", call("ratio", neg(call("sqrt", x)), ypos), true, false},
      {"-sqrt(x)/y without the sign of y is unknown", call("ratio", neg(call("sqrt", x)), y), false, false},
      {"linear-fractional with positive denominator is quasilinear", call("ratio", lin_num, lin_den), true, true},
      {"linear-fractional with negative denominator is quasilinear", call("ratio", lin_num, neg(lin_den)), true,
       true},
      {"distance ratio is quasiconvex", apply_atom("dist_ratio", {v, a, b}), true, false},
      {"exp is quasilinear", call("exp", x), true, true},
      {"positive odd power is quasilinear", apply_atom("pow_odd", {x}, {3}), true, true},
      {"generalized eigenvalue is quasiconvex", lambda, true, false},
      {"exp of the generalized eigenvalue is quasiconvex", call("exp", lambda), true, false},
      {"exp of exp of the generalized eigenvalue is quasiconvex", call("exp", call("exp", lambda)), true, false},
      {"ceil is quasilinear", call("ceil", x), true, true},
      {"sign is quasilinear", call("sign", x), true, true},
      {"rectangle is quasiconcave", call("rectangle", x), false, true},
      {"length is quasiconvex", call("length", v), true, false},
      {"cardinality of a nonnegative vector is quasiconcave", call("card", vp), false, true},
  };
}

// DCP corpus -----------------------------------------------------------

namespace {

class DcpGrower {
 public:
  DcpGrower(Rng& rng, std::vector<Expr> scalars, Expr vec) : rng_(rng), s_(std::move(scalars)), vec_(std::move(vec)) {}

  Expr affine(int depth) {
    const int pick = depth <= 0 ? 0 : rng_.integer(0, 4);
    switch (pick) {
      case 0: return s_[static_cast<std::size_t>(rng_.integer(0, static_cast<int>(s_.size()) - 1))];
      case 1: return add({affine(depth - 1), affine(depth - 1)});
      case 2: return scale(rng_.uniform(-2.0, 2.0), affine(depth - 1));
      case 3: return apply_atom("index", {vec_}, {rng_.integer(0, vec_.shape().size() - 1)});
      default: return call("sum", apply_atom("product", {make_constant({1.0, -1.0, 2.0}), vec_}));
    }
  }

  Expr convex(int depth) {
    if (depth <= 0) return affine(0);
    switch (rng_.integer(0, 8)) {
      case 0: return call("exp", convex(depth - 1));
      case 1: return call("square", affine(depth - 1));
      case 2: return call("abs", affine(depth - 1));
      case 3: return add({convex(depth - 1), convex(depth - 1)});
      case 4: return apply_atom("maximum", {convex(depth - 1), convex(depth - 1)});
      case 5: return scale(rng_.uniform(0.1, 2.0), convex(depth - 1));
      case 6: return neg(concave(depth - 1));
      case 7: return call("norm2", add({vec_, make_constant({0.5, -1.0, 2.0})}));
      default: return call("sum_squares", vec_);
    }
  }

  Expr concave(int depth) {
    if (depth <= 0) return affine(0);
    switch (rng_.integer(0, 6)) {
      case 0: return call("sqrt", concave(depth - 1));
      case 1: return call("log", concave(depth - 1));
      case 2: return add({concave(depth - 1), concave(depth - 1)});
      case 3: return apply_atom("minimum", {concave(depth - 1), concave(depth - 1)});
      case 4: return apply_atom("geo_mean", {concave(depth - 1), concave(depth - 1)});
      case 5: return scale(-rng_.uniform(0.1, 2.0), convex(depth - 1));
      default: return call("min", vec_);
    }
  }

 private:
  Rng& rng_;
  std::vector<Expr> s_;
  Expr vec_;
};

}  // namespace

std::vector<Problem> dcp_corpus(int random_count, std::uint64_t seed) {
  const Expr x = make_variable("x");
  const Expr y = make_variable("y");
  const Expr z = make_variable("z", Shape::scalar(), Sign::positive);
  const Expr v = make_variable("v", Shape::vector(3));
  const Expr m = make_variable("M", Shape::matrix(2, 3));
  const Expr one = make_constant(1.0);
  const Expr c3 = make_constant({1.0, 2.0, 3.0});
  const Expr a23 = make_constant(MatrixXd::Constant(2, 3, 0.5), Shape::Kind::matrix);

  std::vector<Problem> out = {
      Problem(Sense::minimize, call("sum_squares", v)),
      Problem(Sense::minimize, call("sum_squares", add({v, neg(c3)})), {{call("sum", v), Relop::eq, one}}),
      Problem(Sense::maximize, call("sqrt", x), {{x, Relop::le, make_constant(4.0)}}),
      Problem(Sense::minimize, call("exp", x), {{x, Relop::ge, make_constant(-1.0)}}),
      Problem(Sense::maximize, call("log", z), {{z, Relop::le, make_constant(2.0)}}),
      Problem(Sense::minimize, call("norm2", v), {{apply_atom("index", {v}, {0}), Relop::ge, one}}),
      Problem(Sense::minimize, call("abs", add({x, neg(y)})), {{call("square", x), Relop::le, y}}),
      Problem(Sense::minimize, apply_atom("maximum", {x, y}), {{call("exp", x), Relop::le, call("sqrt", y)}}),
      Problem(Sense::maximize, apply_atom("minimum", {x, y}), {{add({x, y}), Relop::le, one}}),
      Problem(Sense::maximize, apply_atom("geo_mean", {x, y}), {{add({x, y}), Relop::le, one}}),
      Problem(Sense::minimize, call("max", v), {{call("sum", v), Relop::ge, make_constant(3.0)}}),
      Problem(Sense::maximize, call("min", v), {{call("sum", v), Relop::le, make_constant(3.0)}}),
      Problem(Sense::minimize, call("sum", call("square", v)), {{v, Relop::ge, c3}}),
      Problem(Sense::minimize, call("sum_squares", apply_atom("matmul", {a23, v})), {{v, Relop::ge, one}}),
      Problem(Sense::minimize, call("sum_squares", m), {{call("sum", m), Relop::eq, one}}),
      Problem(Sense::minimize, x, {{call("exp", y), Relop::le, x}, {y, Relop::ge, make_constant(2.0)}}),
      Problem(Sense::minimize, make_constant(0.0), {{call("norm2", v), Relop::le, x}, {x, Relop::le, one}}),
      Problem(Sense::maximize, add({call("log", z), neg(z)})),
      Problem(Sense::minimize, add({call("square", x), scale(2.0, call("abs", y))}), {{x, Relop::eq, y}}),
      Problem(Sense::minimize, call("ratio", call("sum_squares", v), make_constant(2.0))),
  };
  Rng rng(seed);
  DcpGrower grow(rng, {x, y, apply_atom("index", {v}, {0})}, v);
  for (int k = 0; k < random_count; ++k) {
    const int depth = rng.integer(1, 4);
    const bool minimize = rng.coin();
    const Expr obj = minimize ? grow.convex(depth) : grow.concave(depth);
    std::vector<Constraint> cons;
    const int nc = rng.integer(0, 3);
    for (int c = 0; c < nc; ++c) {
      switch (rng.integer(0, 3)) {
        case 0: cons.push_back({grow.convex(depth), Relop::le, grow.concave(depth)}); break;
        case 1: cons.push_back({grow.concave(depth), Relop::ge, grow.convex(depth)}); break;
        case 2: cons.push_back({grow.affine(depth), Relop::eq, grow.affine(depth)}); break;
        default: cons.push_back({grow.convex(depth), Relop::le, make_constant(rng.uniform(0.0, 5.0))}); break;
      }
    }
    out.emplace_back(minimize ? Sense::minimize : Sense::maximize, obj, cons, std::vector<Expr>{x, y, v});
  }
  return out;
}

// Jensen fuzzing -------------------------------------------------------

namespace {

using Sampler = std::function<Assignment(Rng&)>;

struct QuasiCase {
  std::string name;
  Expr expr;
  Sampler sample;
  bool quasiconvex;
  bool quasiconcave;
};

Assignment mix(const Assignment& a, const Assignment& b, double theta) {
  Assignment out;
  for (const auto& [k, v] : a) out[k] = theta * v + (1.0 - theta) * b.at(k);
  return out;
}

Value scalar(double v) { return Value::Constant(1, 1, v); }

VectorXd sparse_vector(Rng& r, int n, bool nonneg) {
  VectorXd v(n);
  const int keep = r.integer(0, n);
  for (int i = 0; i < n; ++i) {
    v(i) = (i < keep && r.coin(0.7)) ? (nonneg ? r.uniform(0.1, 3.0) : r.uniform(-3.0, 3.0)) : 0.0;
  }
  return v;
}

std::vector<QuasiCase> quasi_cases() {
  const Expr x = make_variable("x");
  const Expr y = make_variable("y");
  const Expr z = make_variable("z");
  const Expr xp = make_variable("x", Shape::scalar(), Sign::nonnegative);
  const Expr yp = make_variable("y", Shape::scalar(), Sign::nonnegative);
  const Expr xn = make_variable("x", Shape::scalar(), Sign::nonpositive);
  const Expr yn = make_variable("y", Shape::scalar(), Sign::nonpositive);
  const Expr ypos = make_variable("y", Shape::scalar(), Sign::positive);
  const Expr yneg = make_variable("y", Shape::scalar(), Sign::negative);
  const Expr v = make_variable("v", Shape::vector(3));
  const Expr v6 = make_variable("v", Shape::vector(6));
  const Expr v6p = make_variable("v", Shape::vector(6), Sign::nonnegative);
  const Expr mx = make_variable("X", Shape::matrix(3, 3));
  const Expr my = make_variable("Y", Shape::matrix(3, 3));
  const Expr mp = make_variable(VariableInfo{"P", Shape::matrix(3, 3), Sign::unknown, true, true});
  const VectorXd av = (VectorXd(3) << 1.0, 0.0, 0.0).finished();
  const VectorXd bv = (VectorXd(3) << -1.0, 2.0, 0.5).finished();

  auto signs = [](Sign sx, Sign sy) {
    return [sx, sy](Rng& r) { return Assignment{{"x", scalar(r.in_sign(sx))}, {"y", scalar(r.in_sign(sy))}}; };
  };
  auto one = [](double lo, double hi) {
    return [lo, hi](Rng& r) { return Assignment{{"x", scalar(r.uniform(lo, hi))}}; };
  };
  auto pencil = [](double scale) {
    return [scale](Rng& r) { return Assignment{{"X", scale * r.symmetric(3)}, {"Y", r.spd(3, 1.0, 2.0)}}; };
  };

  const Expr w = make_variable("w", Shape::vector(3), Sign::nonnegative);
  const Expr lin_num = add({call("sum", apply_atom("product", {make_constant({1.0, -2.0, 0.5}), w})),
                            make_constant(1.0)});
  const Expr lin_den = add({call("sum", w), make_constant(3.0)});
  const Expr lambda = call("gen_lambda_max", mx, my);

  return {
      {"ratio(x, y > 0)", call("ratio", x, ypos), signs(Sign::unknown, Sign::positive), true, true},
      {"ratio(x, y < 0)", call("ratio", x, yneg), signs(Sign::unknown, Sign::negative), true, true},
      {"product on R2+", call("product", xp, yp), signs(Sign::nonnegative, Sign::nonnegative), false, true},
      {"product on R2-", call("product", xn, yn), signs(Sign::nonpositive, Sign::nonpositive), false, true},
      {"product of opposite signs", call("product", xp, yn), signs(Sign::nonnegative, Sign::nonpositive), true,
       false},
      {"dist_ratio on its halfspace",
       apply_atom("dist_ratio", {v, make_constant(av, Shape::Kind::vector), make_constant(bv, Shape::Kind::vector)}),
       [av, bv](Rng& r) {
         for (;;) {
           VectorXd p(3);
           for (int i = 0; i < 3; ++i) p(i) = r.uniform(-4.0, 4.0);
           if ((p - av).norm() <= (p - bv).norm()) return Assignment{{"v", p}};
         }
       },
       true, false},
      {"gen_lambda_max", lambda, pencil(1.0), true, false},
      {"exp(exp(gen_lambda_max))", call("exp", call("exp", lambda)), pencil(0.3), true, false},
      {"pow_odd(x; 3)", apply_atom("pow_odd", {x}, {3}), one(-3.0, 3.0), true, true},
      {"pow_odd(x; 5)", apply_atom("pow_odd", {x}, {5}), one(-3.0, 3.0), true, true},
      {"ceil", call("ceil", x), one(-4.0, 4.0), true, true},
      {"floor", call("floor", x), one(-4.0, 4.0), true, true},
      {"sign", call("sign", x), one(-2.0, 2.0), true, true},
      {"rectangle", call("rectangle", x), one(-1.5, 1.5), false, true},
      {"length", call("length", v6), [](Rng& r) { return Assignment{{"v", sparse_vector(r, 6, false)}}; }, true,
       false},
      {"card on nonnegative vectors", call("card", v6p),
       [](Rng& r) { return Assignment{{"v", sparse_vector(r, 6, true)}}; }, false, true},
      {"rank on psd matrices", call("rank", mp),
       [](Rng& r) {
         const MatrixXd g = r.gaussian(3, r.integer(0, 3));
         return Assignment{{"P", g * g.transpose()}};
       },
       false, true},
      {"-sqrt(x)/y", call("ratio", neg(call("sqrt", x)), ypos),
       [](Rng& r) { return Assignment{{"x", scalar(r.uniform(0.0, 4.0))}, {"y", scalar(r.uniform(0.05, 3.0))}}; },
       true, false},
      {"linear-fractional", call("ratio", lin_num, lin_den),
       [](Rng& r) {
         VectorXd p(3);
         for (int i = 0; i < 3; ++i) p(i) = r.uniform(0.0, 3.0);
         return Assignment{{"w", p}};
       },
       true, true},
      {"maximum(x / y, ceil(z))", apply_atom("maximum", {call("ratio", x, ypos), call("ceil", z)}),
       [](Rng& r) {
         return Assignment{{"x", scalar(r.uniform(-3.0, 3.0))}, {"y", scalar(r.uniform(0.05, 3.0))},
                           {"z", scalar(r.uniform(-3.0, 3.0))}};
       },
       true, false},
      {"minimum(sqrt(x) / exp(y), rectangle(z))",
       apply_atom("minimum", {call("ratio", call("sqrt", x), call("exp", y)), call("rectangle", z)}),
       [](Rng& r) {
         return Assignment{{"x", scalar(r.uniform(0.0, 3.0))}, {"y", scalar(r.uniform(-2.0, 2.0))},
                           {"z", scalar(r.uniform(-1.0, 1.0))}};
       },
       false, true},
  };
}

}  // namespace

std::vector<SuiteReport> jensen_suite(int samples, double tol, std::uint64_t seed) {
  std::vector<SuiteReport> out;
  Rng rng(seed);
  for (const auto& c : quasi_cases()) {
    SuiteReport rep;
    rep.name = "jensen " + c.name;
    const CurvatureFlags f = curvature_of(c.expr);
    ++rep.checks;
    if ((c.quasiconvex && !f.is_quasiconvex) || (c.quasiconcave && !f.is_quasiconcave)) {
      rep.fail("analysis reports " + f.str());
    }
    for (int k = 0; k < samples; ++k) {
      const Assignment a = c.sample(rng);
      const Assignment b = c.sample(rng);
      const double theta = rng.uniform(0.0, 1.0);
      const Assignment m = mix(a, b, theta);
      const double fa = eval_scalar(c.expr, a), fb = eval_scalar(c.expr, b), fm = eval_scalar(c.expr, m);
      if (c.quasiconvex) {
        ++rep.checks;
        if (fm > std::max(fa, fb) + tol) {
          std::ostringstream s;
          s << "quasiconvex Jensen: f(mid) = " << fm << " > max(" << fa << ", " << fb << ")";
          rep.fail(s.str());
        }
      }
      if (c.quasiconcave) {
        ++rep.checks;
        if (fm < std::min(fa, fb) - tol) {
          std::ostringstream s;
          s << "quasiconcave Jensen: f(mid) = " << fm << " < min(" << fa << ", " << fb << ")";
          rep.fail(s.str());
        }
      }
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// Level-set equivalence -----------------------------------------------

namespace {

struct LevelCase {
  std::string name;
  Expr expr;
  Sampler sample;
  bool sub;
  bool super;
};

std::vector<LevelCase> level_cases() {
  std::vector<LevelCase> out;
  for (const auto& q : quasi_cases()) {
    if (q.name == "card on nonnegative vectors" || q.name == "rank on psd matrices") continue;
    out.push_back({q.name, q.expr, q.sample, q.quasiconvex, q.quasiconcave});
  }
  const Expr x = make_variable("x");
  const Expr y = make_variable("y");
  const Expr xp = make_variable("x", Shape::scalar(), Sign::nonnegative);
  const Expr yp = make_variable("y", Shape::scalar(), Sign::nonnegative);
  const Expr ypos = make_variable("y", Shape::scalar(), Sign::positive);
  const Expr v = make_variable("v", Shape::vector(4));
  const Expr mx = make_variable("X", Shape::matrix(3, 3));
  const Expr my = make_variable("Y", Shape::matrix(3, 3));

  auto pair = [](double xl, double xh, double yl, double yh) {
    return [=](Rng& r) { return Assignment{{"x", scalar(r.uniform(xl, xh))}, {"y", scalar(r.uniform(yl, yh))}}; };
  };
  auto one = [](double lo, double hi) {
    return [lo, hi](Rng& r) { return Assignment{{"x", scalar(r.uniform(lo, hi))}}; };
  };
  auto vec = [](Rng& r) {
    VectorXd p(4);
    for (int i = 0; i < 4; ++i) p(i) = r.uniform(-2.0, 2.0);
    return Assignment{{"v", p}};
  };

  out.push_back({"ratio(x >= 0, y > 0)", call("ratio", xp, ypos), pair(0.0, 3.0, 0.05, 3.0), true, true});
  out.push_back({"exp", call("exp", x), one(-3.0, 3.0), true, true});
  out.push_back({"log", call("log", x), one(0.05, 5.0), true, true});
  out.push_back({"sqrt", call("sqrt", x), one(0.0, 5.0), true, true});
  out.push_back({"abs", call("abs", x), one(-3.0, 3.0), true, false});
  out.push_back({"square", call("square", x), one(-3.0, 3.0), true, false});
  out.push_back({"neg", neg(x), one(-3.0, 3.0), true, true});
  out.push_back({"scale", scale(-2.5, x), one(-3.0, 3.0), true, true});
  out.push_back({"sum_squares", call("sum_squares", v), vec, true, false});
  out.push_back({"norm2", call("norm2", v), vec, true, false});
  out.push_back({"max", call("max", v), vec, true, false});
  out.push_back({"min", call("min", v), vec, false, true});
  out.push_back({"maximum", apply_atom("maximum", {x, y}), pair(-3.0, 3.0, -3.0, 3.0), true, false});
  out.push_back({"minimum", apply_atom("minimum", {x, y}), pair(-3.0, 3.0, -3.0, 3.0), false, true});
  out.push_back({"geo_mean", apply_atom("geo_mean", {xp, yp}), pair(0.0, 3.0, 0.0, 3.0), false, true});
  out.push_back({"exp(x / y)", call("exp", call("ratio", x, ypos)), pair(-3.0, 3.0, 0.05, 3.0), true, true});
  out.push_back({"ceil(x / y)", call("ceil", call("ratio", x, ypos)), pair(-3.0, 3.0, 0.05, 3.0), true, true});
  out.push_back({"-(x * y) on R2+", neg(call("product", xp, yp)), pair(0.0, 3.0, 0.0, 3.0), true, false});
  out.push_back({"exp(gen_lambda_max)", call("exp", call("gen_lambda_max", mx, my)),
                 [](Rng& r) { return Assignment{{"X", r.symmetric(3)}, {"Y", r.spd(3, 0.5, 2.0)}}; }, true, false});
  return out;
}

}  // namespace

std::vector<SuiteReport> level_set_suite(int points, int levels, double band, std::uint64_t seed) {
  std::vector<SuiteReport> out;
  Rng rng(seed);
  const CanonOptions opts;
  for (const auto& c : level_cases()) {
    const std::vector<Expr> vars = collect_variables(c.expr);
    std::vector<double> values;
    for (int k = 0; k < 200; ++k) values.push_back(eval_scalar(c.expr, c.sample(rng)));
    std::sort(values.begin(), values.end());
    const bool integer = is_integer_valued(c.expr);
    const double spread = std::max(values.back() - values.front(), 1e-3);
    std::vector<double> ts;
    for (int l = 0; l < levels; ++l) {
      const double q = values[static_cast<std::size_t>((l + 0.5) / levels * static_cast<double>(values.size()))];
      const double jitter = (l % 2 ? 0.3 : -0.3) * (integer ? 1.0 : 0.01 * spread);
      ts.push_back(q + jitter);
    }
    for (int dir = 0; dir < 2; ++dir) {
      const bool below = dir == 0;
      if ((below && !c.sub) || (!below && !c.super)) continue;
      SuiteReport rep;
      rep.name = std::string(below ? "sublevel " : "superlevel ") + c.name;
      long inside = 0;
      for (double t : ts) {
        ConstraintSet set;
        try {
          set = below ? emit_sublevel(c.expr, t, opts) : emit_superlevel(c.expr, t, opts);
        } catch (const Error& e) {
          rep.fail("t = " + std::to_string(t) + ": " + e.what());
          continue;
        }
        const ConicProblem cp = set.infeasible ? ConicProblem{} : dcp_to_conic(set, vars, opts);
        for (int k = 0; k < points; ++k) {
          const Assignment x = c.sample(rng);
          const double f = eval_scalar(c.expr, x);
          if (std::abs(f - t) <= band) continue;
          const bool truth = below ? f <= t : f >= t;
          const bool got = !set.infeasible && member(cp, x);
          ++rep.checks;
          inside += truth;
          if (truth != got) {
            std::ostringstream s;
            s << "t = " << t << ", f = " << f << ": emitted constraints say " << (got ? "inside" : "outside");
            rep.fail(s.str());
          }
        }
      }
      if (inside == 0 || inside == rep.checks) rep.fail("levels did not split the samples");
      out.push_back(std::move(rep));
    }
  }
  return out;
}

// Cone projections -----------------------------------------------------

namespace {

bool in_cone(const Cone& c, const VectorXd& v, double tol) {
  const int m = c.dim;
  switch (c.kind) {
    case ConeKind::zero: return v.cwiseAbs().maxCoeff() <= tol;
    case ConeKind::nonneg: return v.minCoeff() >= -tol;
    case ConeKind::soc: return v.tail(m - 1).norm() <= v(0) + tol;
    case ConeKind::rsoc:
      return v(0) >= -tol && v(1) >= -tol && v.tail(m - 2).squaredNorm() <= 2.0 * v(0) * v(1) + tol;
    case ConeKind::psd: {
      Eigen::SelfAdjointEigenSolver<MatrixXd> es(psd_unpack(v, c.order), Eigen::EigenvaluesOnly);
      return es.eigenvalues().minCoeff() >= -tol;
    }
    case ConeKind::exp: {
      for (int k = 0; k < m; k += 3) {
        const double a = v(k), b = v(k + 1), z = v(k + 2);
        // Small positive b can satisfy either condition.
        const bool interior = b > 0 && b * std::exp(a / b) <= z + tol * (1.0 + std::abs(z));
        const bool closure = std::abs(b) <= tol && a <= tol && z >= -tol;
        if (!interior && !closure) return false;
      }
      return true;
    }
  }
  return false;
}

}  // namespace

std::vector<SuiteReport> projection_suite(int samples, std::uint64_t seed) {
  const std::vector<std::pair<std::string, Cone>> cones = {
      {"zero(3)", Cone::zero(3)}, {"nonneg(5)", Cone::nonneg(5)}, {"soc(4)", Cone::soc(4)},
      {"rsoc(5)", Cone::rsoc(5)}, {"psd(3)", Cone::psd(3)},       {"exp(1)", Cone::exp(1)},
  };
  std::vector<SuiteReport> out;
  Rng rng(seed);
  for (const auto& [name, cone] : cones) {
    SuiteReport rep;
    rep.name = "projection " + name;
    for (int k = 0; k < samples; ++k) {
      const double s = std::pow(10.0, rng.uniform(-2.0, 2.0));
      const VectorXd u = s * rng.gaussian(cone.dim, 1);
      const VectorXd v = s * rng.gaussian(cone.dim, 1);
      const VectorXd pu = project(cone, u);
      const VectorXd pv = project(cone, v);
      const double scale = 1.0 + u.norm();
      rep.checks += 4;
      if (!in_cone(cone, pu, 1e-9 * scale)) rep.fail("projection left the cone");
      if ((project(cone, pu) - pu).norm() > 1e-9 * scale) rep.fail("projection is not idempotent");
      if ((pu - pv).norm() > (u - v).norm() * (1.0 + 1e-9) + 1e-9 * scale) rep.fail("projection expands a distance");
      if (std::abs(pu.dot(pu - u)) > 1e-7 * scale * scale) rep.fail("residual not orthogonal to the projection");
    }
    out.push_back(std::move(rep));
  }
  return out;
}

// LP feasibility -------------------------------------------------------

SuiteReport lp_suite(const std::string& solver, std::uint64_t seed, bool inconclusive_is_error) {
  SuiteReport rep;
  rep.name = "LP feasibility (" + solver + ")";
  Rng rng(seed);
  const auto backend = make_solver(solver);
  for (int k = 0; k < 20; ++k) {
    const bool feasible = k % 2 == 0;
    const int n = rng.integer(3, 8);
    const int m = rng.integer(n + 2, 2 * n + 4);
    const int meq = feasible ? rng.integer(0, n / 2) : 0;
    ConicProblem p;
    p.num_vars = n;
    MatrixXd a = rng.gaussian(meq + m, n);
    VectorXd b(meq + m);
    if (feasible) {
      const VectorXd x0 = rng.gaussian(n, 1);
      for (int i = 0; i < meq + m; ++i) {
        const double slack = i < meq ? 0.0 : rng.uniform(0.2, 2.0);
        b(i) = slack - a.row(i).dot(x0);
      }
    } else {
      // A Farkas vector y ≥ 0 with Aᵀy = 0 and bᵀy < 0 proves infeasibility.
      VectorXd y(m);
      for (int i = 0; i < m; ++i) y(i) = rng.coin(0.2) ? 0.0 : rng.uniform(0.1, 2.0);
      y(0) = 1.0;
      a -= y * (y.transpose() * a) / y.squaredNorm();
      b = rng.gaussian(m, 1);
      const double gamma = y.norm();
      b -= y * (b.dot(y) + gamma) / y.squaredNorm();
    }
    p.A = a;
    p.b = b;
    if (meq > 0) p.blocks.push_back({Cone::zero(meq), 0, "eq"});
    p.blocks.push_back({Cone::nonneg(m), meq, "ineq"});
    p.variables.push_back({"x", Shape::vector(n), false, {}});
    for (int j = 0; j < n; ++j) p.variables.back().coords.push_back(j);

    const FeasOutcome o = backend->solve(p);
    ++rep.checks;
    const std::string tag = "instance " + std::to_string(k) + " (" + (feasible ? "feasible" : "infeasible") + "): ";
    if (o.status == FeasStatus::inconclusive) {
      ++rep.inconclusive;
      if (inconclusive_is_error) rep.fail(tag + "inconclusive, " + o.message);
    } else if (feasible != (o.status == FeasStatus::feasible)) {
      rep.fail(tag + std::string(to_string(o.status)) + " " + o.message);
    } else if (feasible && p.cone_distance(o.x) > 1e-6) {
      rep.fail(tag + "returned point violates the rows by " + std::to_string(p.cone_distance(o.x)));
    }
  }
  return rep;
}

// Bisection oracle -----------------------------------------------------

ThresholdOracle::ThresholdOracle(double threshold, bool integer, std::function<double(double)> value)
    : threshold_(threshold), integer_(integer), value_(std::move(value)) {}

Probe ThresholdOracle::probe(double t) {
  ++calls;
  levels.push_back(t);
  Probe p;
  if (t >= threshold_) {
    p.status = FeasStatus::feasible;
    p.fx = value_ ? value_(t) : t;
  } else {
    p.status = FeasStatus::infeasible;
  }
  return p;
}

Probe ThresholdOracle::base() {
  Probe p;
  p.status = FeasStatus::feasible;
  p.fx = std::numeric_limits<double>::infinity();
  return p;
}

}  // namespace dqcp::testing

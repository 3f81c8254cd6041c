#include "dqcp/expr.hpp"

#include <atomic>
#include <cmath>
#include <sstream>

#include "dqcp/atom.hpp"
#include "dqcp/error.hpp"

namespace dqcp {

struct Expr::Node {
  Kind kind = Kind::constant;
  Shape shape;
  Sign sign = Sign::unknown;
  bool constant = true;
  VariableInfo var;
  Value value;
  const Atom* atom = nullptr;
  std::vector<Expr> children;
  std::vector<long> params;
};

namespace {

Sign sign_of_array(const Value& v) {
  if (v.size() == 0) return Sign::zero;
  Sign s = sign_of_value(v(0, 0));
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    for (Eigen::Index j = 0; j < v.cols(); ++j) s = sign_join(s, sign_of_value(v(i, j)));
  }
  return s;
}

std::string format_number(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

}  // namespace

Expr::Kind Expr::kind() const { return node_->kind; }
const Shape& Expr::shape() const { return node_->shape; }
Sign Expr::sign() const { return node_->sign; }
bool Expr::is_constant() const { return node_->constant; }

const VariableInfo& Expr::variable() const {
  if (node_->kind != Kind::variable) throw Error("expression is not a variable");
  return node_->var;
}

const Value& Expr::value() const {
  if (node_->kind != Kind::constant) throw Error("expression is not a constant leaf");
  return node_->value;
}

const Atom& Expr::atom() const {
  if (node_->kind != Kind::atom) throw Error("expression is not an atom application");
  return *node_->atom;
}

std::span<const Expr> Expr::children() const { return node_->children; }
std::span<const long> Expr::params() const { return node_->params; }

Expr make_variable(VariableInfo info) {
  if (info.name.empty()) throw ShapeError("variable name must not be empty");
  if (info.psd) info.symmetric = true;
  if (info.symmetric && !info.shape.is_square()) {
    throw ShapeError("variable '" + info.name + "': symmetric requires a square matrix shape, got " +
                     info.shape.str());
  }
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::variable;
  n->shape = info.shape;
  n->sign = info.sign;
  n->constant = false;
  n->var = std::move(info);
  return Expr(std::move(n));
}

Expr make_variable(std::string name, Shape shape, Sign sign) {
  VariableInfo info;
  info.name = std::move(name);
  info.shape = shape;
  info.sign = sign;
  return make_variable(std::move(info));
}

Expr make_constant(Value value, Shape::Kind kind) {
  if (!value.allFinite()) throw DomainError("constants must be finite (NaN/Inf rejected)");
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::constant;
  n->shape = shape_of(value, kind);
  n->sign = sign_of_array(value);
  n->value = std::move(value);
  return Expr(std::move(n));
}

Expr make_constant(double v) {
  Value m(1, 1);
  m(0, 0) = v;
  return make_constant(std::move(m), Shape::Kind::scalar);
}

Expr make_constant(const std::vector<double>& v) {
  Value m(static_cast<Eigen::Index>(v.size()), 1);
  for (std::size_t i = 0; i < v.size(); ++i) m(static_cast<Eigen::Index>(i), 0) = v[i];
  return make_constant(std::move(m), Shape::Kind::vector);
}

Expr apply_atom(std::string_view atom_name, std::vector<Expr> children, std::vector<long> params) {
  return apply_atom(atom(atom_name), std::move(children), std::move(params));
}

Expr apply_atom(const Atom& atom, std::vector<Expr> children, std::vector<long> params) {
  const int nargs = static_cast<int>(children.size());
  if (nargs < atom.min_args() || (atom.max_args() >= 0 && nargs > atom.max_args())) {
    throw ShapeError(std::string(atom.name()) + ": wrong number of arguments (" +
                     std::to_string(nargs) + ")");
  }
  const int nparams = static_cast<int>(params.size());
  if (nparams < atom.min_params() || nparams > atom.max_params()) {
    throw ShapeError(std::string(atom.name()) + ": wrong number of integer parameters (" +
                     std::to_string(nparams) + ")");
  }
  auto n = std::make_shared<Expr::Node>();
  n->kind = Expr::Kind::atom;
  n->atom = &atom;
  n->children = std::move(children);
  n->params = std::move(params);
  const AtomArgs args{n->children, n->params};
  n->shape = atom.shape(args);
  n->constant = true;
  for (const auto& c : n->children) n->constant = n->constant && c.is_constant();
  if (n->constant) {
    // Folded for the sign only; the tree itself is kept as written.
    Expr tmp(n);
    n->sign = sign_of_array(constant_value(tmp));
  } else {
    n->sign = atom.sign(args);
  }
  return Expr(std::move(n));
}

Expr VariableScope::make_variable(std::string name, Shape shape, Sign sign, bool symmetric,
                                  bool psd) {
  if (contains(name)) throw NameCollisionError("duplicate variable name '" + name + "'");
  VariableInfo info{std::move(name), shape, sign, symmetric, psd};
  vars_.push_back(dqcp::make_variable(std::move(info)));
  return vars_.back();
}

bool VariableScope::contains(std::string_view name) const {
  for (const auto& v : vars_) {
    if (v.variable().name == name) return true;
  }
  return false;
}

Value eval(const Expr& e, const Assignment& values, const EvalOptions& opts) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e.value();
    case Expr::Kind::variable: {
      const auto& info = e.variable();
      auto it = values.find(info.name);
      if (it == values.end()) throw Error("no value for variable '" + info.name + "'");
      if (it->second.rows() != info.shape.rows || it->second.cols() != info.shape.cols) {
        throw ShapeError("value for '" + info.name + "' does not match shape " + info.shape.str());
      }
      return it->second;
    }
    case Expr::Kind::atom:
      break;
  }
  std::vector<Value> args;
  args.reserve(e.children().size());
  for (const auto& c : e.children()) args.push_back(eval(c, values, opts));
  try {
    return e.atom().evaluate(args, e.params(), opts);
  } catch (const DomainError& err) {
    throw DomainError(std::string(err.what()) + " at " + to_string(e));
  }
}

double eval_scalar(const Expr& e, const Assignment& values, const EvalOptions& opts) {
  Value v = eval(e, values, opts);
  if (v.size() != 1) throw ShapeError("expected a scalar expression, got " + e.shape().str());
  return v(0, 0);
}

Value constant_value(const Expr& e) {
  if (!e.is_constant()) throw Error("expression depends on variables: " + to_string(e));
  static const Assignment empty;
  return eval(e, empty);
}

void collect_variables(const Expr& e, std::vector<Expr>& out) {
  if (e.is_variable()) {
    for (const auto& v : out) {
      if (v.variable().name == e.variable().name) return;
    }
    out.push_back(e);
    return;
  }
  if (e.is_atom()) {
    for (const auto& c : e.children()) collect_variables(c, out);
  }
}

std::vector<Expr> collect_variables(const Expr& e) {
  std::vector<Expr> out;
  collect_variables(e, out);
  return out;
}

std::string to_string(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::variable:
      return e.variable().name;
    case Expr::Kind::constant: {
      const Value& v = e.value();
      if (v.size() == 1 && e.shape().is_scalar()) return format_number(v(0, 0));
      if (v.size() > 6) return "const " + e.shape().str();
      std::string s = "[";
      for (Eigen::Index i = 0; i < v.rows(); ++i) {
        if (i) s += ", ";
        if (e.shape().is_matrix()) s += "[";
        for (Eigen::Index j = 0; j < v.cols(); ++j) {
          if (j) s += ", ";
          s += format_number(v(i, j));
        }
        if (e.shape().is_matrix()) s += "]";
      }
      return s + "]";
    }
    case Expr::Kind::atom:
      break;
  }
  std::string s(e.atom().name());
  s += "(";
  bool first = true;
  for (const auto& c : e.children()) {
    if (!first) s += ", ";
    first = false;
    s += to_string(c);
  }
  for (long p : e.params()) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(p);
  }
  return s + ")";
}

namespace ops {

Expr add(std::vector<Expr> terms) { return apply_atom("add", std::move(terms)); }
Expr neg(Expr e) { return apply_atom("neg", {std::move(e)}); }
Expr scale(double c, Expr e) { return apply_atom("scale", {make_constant(c), std::move(e)}); }
Expr call(std::string_view name, Expr e) { return apply_atom(name, {std::move(e)}); }
Expr call(std::string_view name, Expr a, Expr b) {
  return apply_atom(name, {std::move(a), std::move(b)});
}
Expr operator*(Expr a, Expr b) { return apply_atom("product", {std::move(a), std::move(b)}); }
Expr operator/(Expr a, Expr b) { return apply_atom("ratio", {std::move(a), std::move(b)}); }

}  // namespace ops

}  // namespace dqcp

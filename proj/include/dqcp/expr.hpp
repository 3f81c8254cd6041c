#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqcp/shape.hpp"
#include "dqcp/sign.hpp"

namespace dqcp {

class Atom;

struct VariableInfo {
  std::string name;
  Shape shape;
  Sign sign = Sign::unknown;
  // Matrix attributes; symmetric requires a square shape, psd implies symmetric.
  bool symmetric = false;
  bool psd = false;
};

// Immutable expression tree. Copies share the underlying node, so an Expr is
// cheap to pass around and safe to share between threads.
class Expr {
 public:
  enum class Kind { variable, constant, atom };

  Kind kind() const;
  bool is_variable() const { return kind() == Kind::variable; }
  bool is_constant_leaf() const { return kind() == Kind::constant; }
  bool is_atom() const { return kind() == Kind::atom; }

  const Shape& shape() const;
  Sign sign() const;
  // True when the subtree contains no variables.
  bool is_constant() const;

  const VariableInfo& variable() const;
  const Value& value() const;

  const Atom& atom() const;
  std::span<const Expr> children() const;
  std::span<const long> params() const;

  // Identity of the shared node.
  const void* node_id() const { return node_.get(); }
  bool same_node(const Expr& o) const { return node_ == o.node_; }

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;

  friend Expr make_variable(VariableInfo info);
  friend Expr make_constant(Value value, Shape::Kind kind);
  friend Expr apply_atom(const Atom& atom, std::vector<Expr> children, std::vector<long> params);
};

Expr make_variable(VariableInfo info);
Expr make_variable(std::string name, Shape shape = Shape::scalar(), Sign sign = Sign::unknown);

// Rejects NaN and infinite entries.
Expr make_constant(Value value, Shape::Kind kind);
Expr make_constant(double v);
Expr make_constant(const std::vector<double>& v);

// Looks the atom up in the registry; throws UnknownAtomError, ShapeError or
// DomainError (for a fully constant application outside the atom's domain).
Expr apply_atom(std::string_view atom_name, std::vector<Expr> children,
                std::vector<long> params = {});
Expr apply_atom(const Atom& atom, std::vector<Expr> children, std::vector<long> params = {});

// Hands out variables and rejects duplicate names.
class VariableScope {
 public:
  Expr make_variable(std::string name, Shape shape = Shape::scalar(), Sign sign = Sign::unknown,
                     bool symmetric = false, bool psd = false);
  bool contains(std::string_view name) const;
  const std::vector<Expr>& variables() const { return vars_; }

 private:
  std::vector<Expr> vars_;
};

using Assignment = std::map<std::string, Value, std::less<>>;

struct EvalOptions {
  // Inputs to sqrt/geo_mean within this distance below their domain are clamped
  // onto it instead of raising DomainError.
  double domain_tol = 0.0;
};

Value eval(const Expr& e, const Assignment& values, const EvalOptions& opts = {});
double eval_scalar(const Expr& e, const Assignment& values, const EvalOptions& opts = {});
// Value of a variable-free subtree.
Value constant_value(const Expr& e);

// Variables in first-appearance (preorder) order, one entry per name.
std::vector<Expr> collect_variables(const Expr& e);
void collect_variables(const Expr& e, std::vector<Expr>& out);

std::string to_string(const Expr& e);

// Infix-free construction helpers used by tests and the document parser.
namespace ops {
Expr add(std::vector<Expr> terms);
Expr neg(Expr e);
Expr scale(double c, Expr e);
Expr call(std::string_view atom, Expr e);
Expr call(std::string_view atom, Expr a, Expr b);

inline Expr operator+(Expr a, Expr b) { return add({std::move(a), std::move(b)}); }
inline Expr operator-(Expr a) { return neg(std::move(a)); }
inline Expr operator-(Expr a, Expr b) { return add({std::move(a), neg(std::move(b))}); }
inline Expr operator*(double c, Expr e) { return scale(c, std::move(e)); }
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
}  // namespace ops

}  // namespace dqcp

#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dqcp/expr.hpp"

namespace dqcp {

// A constraint in DCP form: lhs ≤ rhs with lhs convex and rhs concave,
// lhs == rhs with both sides affine, or lhs ⪰ 0 for an affine symmetric
// matrix expression.
struct DcpConstraint {
  enum class Kind { le, eq, psd };

  Kind kind = Kind::le;
  Expr lhs;
  Expr rhs;
};

DcpConstraint dcp_le(Expr lhs, Expr rhs);
DcpConstraint dcp_ge(Expr lhs, Expr rhs);
DcpConstraint dcp_eq(Expr lhs, Expr rhs);
DcpConstraint dcp_psd(Expr matrix);

std::string to_string(const DcpConstraint& c);

// Conjunction of DCP constraints, or a marker that the level set is empty.
struct ConstraintSet {
  std::vector<DcpConstraint> items;
  bool infeasible = false;
  std::string reason;

  static ConstraintSet none() { return {}; }
  static ConstraintSet never(std::string why);

  void add(DcpConstraint c) { items.push_back(std::move(c)); }
  void append(const ConstraintSet& other);
};

struct CanonOptions {
  // Closes strict inequalities such as ceil(x) ≥ t ⟺ x > ⌈t⌉ - 1.
  double strict_margin = 1e-6;
  // gen_lambda_max enforces B ≻ 0 as B ⪰ psd_margin·I.
  double psd_margin = 1e-6;
};

// Preimage of a level set under a monotone scalar map: the argument must lie
// in [lower, upper]; empty when no argument reaches the level.
struct Preimage {
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
  bool empty = false;

  static Preimage everything() { return {}; }
  static Preimage nothing() {
    Preimage p;
    p.empty = true;
    return p;
  }
  static Preimage at_most(double v) {
    Preimage p;
    p.upper = v;
    return p;
  }
  static Preimage at_least(double v) {
    Preimage p;
    p.lower = v;
    return p;
  }
  static Preimage between(double lo, double hi) {
    Preimage p;
    p.lower = lo;
    p.upper = hi;
    p.empty = lo > hi;
    return p;
  }

  bool contains(double v) const { return !empty && v >= lower && v <= upper; }
};

}  // namespace dqcp

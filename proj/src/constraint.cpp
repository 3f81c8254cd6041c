#include "dqcp/constraint.hpp"

namespace dqcp {

DcpConstraint dcp_le(Expr lhs, Expr rhs) { return {DcpConstraint::Kind::le, std::move(lhs), std::move(rhs)}; }

DcpConstraint dcp_ge(Expr lhs, Expr rhs) { return {DcpConstraint::Kind::le, std::move(rhs), std::move(lhs)}; }

DcpConstraint dcp_eq(Expr lhs, Expr rhs) { return {DcpConstraint::Kind::eq, std::move(lhs), std::move(rhs)}; }

DcpConstraint dcp_psd(Expr matrix) {
  Expr zero = make_constant(0.0);
  return {DcpConstraint::Kind::psd, std::move(matrix), std::move(zero)};
}

std::string to_string(const DcpConstraint& c) {
  switch (c.kind) {
    case DcpConstraint::Kind::le: return to_string(c.lhs) + " <= " + to_string(c.rhs);
    case DcpConstraint::Kind::eq: return to_string(c.lhs) + " == " + to_string(c.rhs);
    case DcpConstraint::Kind::psd: return to_string(c.lhs) + " >> 0";
  }
  return "?";
}

ConstraintSet ConstraintSet::never(std::string why) {
  ConstraintSet s;
  s.infeasible = true;
  s.reason = std::move(why);
  return s;
}

void ConstraintSet::append(const ConstraintSet& other) {
  if (other.infeasible && !infeasible) {
    infeasible = true;
    reason = other.reason;
  }
  items.insert(items.end(), other.items.begin(), other.items.end());
}

}  // namespace dqcp

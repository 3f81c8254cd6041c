#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "dqcp/curvature.hpp"
#include "dqcp/expr.hpp"

namespace dqcp {

enum class Rule {
  leaf,
  dcp_composition,
  quasi_composition,
  monotone_of_quasi,
  max_of_qcvx,
  min_of_qccv,
  none,  // nothing applied; see the failure text
};

std::string_view to_string(Rule r);

// Per-node justification, isomorphic to the expression tree.
struct CurvatureCertificate {
  std::string label;  // variable name, constant text or atom name
  Shape shape;
  Sign sign = Sign::unknown;
  CurvatureFlags flags;
  Rule rule = Rule::none;
  // For nodes without any curvature: the first violated hypothesis.
  std::string failure;
  std::vector<CurvatureCertificate> children;
};

CurvatureFlags curvature_of(const Expr& e);
CurvatureCertificate certify(const Expr& e);
// Indented tree, one node per line.
std::string format_certificate(const CurvatureCertificate& c);

// Integer atoms at the root, or max/min/neg of integer-valued expressions,
// or integral constants. Conservative.
bool is_integer_valued(const Expr& e);

enum class Sense { minimize, maximize };
enum class Relop { le, ge, eq };

std::string_view to_string(Sense s);
std::string_view to_string(Relop r);

struct Constraint {
  Expr lhs;
  Relop op = Relop::le;
  Expr rhs;
};

std::string to_string(const Constraint& c);

class Problem {
 public:
  // The objective must be scalar; constraint sides must have equal shapes,
  // or one side must be scalar. `declared` lists variables that belong to
  // the problem even if unused. Distinct variables sharing a name are
  // rejected.
  Problem(Sense sense, Expr objective, std::vector<Constraint> constraints = {},
          std::vector<Expr> declared = {});

  Sense sense() const { return sense_; }
  const Expr& objective() const { return objective_; }
  const std::vector<Constraint>& constraints() const { return constraints_; }
  // Declared variables first, then the rest in order of appearance.
  const std::vector<Expr>& variables() const { return variables_; }

 private:
  Sense sense_;
  Expr objective_;
  std::vector<Constraint> constraints_;
  std::vector<Expr> variables_;
};

struct ProblemReport {
  bool dqcp = false;
  bool dcp = false;
  std::vector<std::string> issues;  // why the problem is not DQCP
  CurvatureCertificate objective;
  std::vector<CurvatureCertificate> lhs;
  std::vector<CurvatureCertificate> rhs;
};

ProblemReport verify(const Problem& p);
bool is_dqcp(const Problem& p);
bool is_dcp(const Problem& p);

// Convex ≤ concave, concave ≥ convex, affine = affine.
bool is_dcp_constraint(const CurvatureFlags& lhs, Relop op, const CurvatureFlags& rhs);
// The DCP rules, plus a quasiconvex side bounded by a constant.
bool is_dqcp_constraint(const CurvatureFlags& lhs, Relop op, const CurvatureFlags& rhs);

}  // namespace dqcp

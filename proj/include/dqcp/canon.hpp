#pragma once

#include <span>
#include <string>
#include <vector>

#include "dqcp/analysis.hpp"
#include "dqcp/conic_problem.hpp"
#include "dqcp/constraint.hpp"

namespace dqcp {

// {e ≤ t} for a quasiconvex scalar expression, as DCP constraints. The
// result may be the trivially infeasible marker. Throws
// NoRepresentationError (with the node path) when some level set on the way
// has no conic form, e.g. for card or rank.
ConstraintSet emit_sublevel(const Expr& e, double t, const CanonOptions& o = {});
// {e ≥ t} for a quasiconcave scalar expression.
ConstraintSet emit_superlevel(const Expr& e, double t, const CanonOptions& o = {});

// Graph expansion of DCP constraints into A x + b ∈ K. `variables` are
// registered first, in order, so their coordinates do not depend on the
// constraints; declared signs and psd attributes become cone rows.
ConicProblem dcp_to_conic(const ConstraintSet& constraints, std::span<const Expr> variables,
                          const CanonOptions& o = {});

// t ↦ {x : constraints hold and objective(x) ≤ t}, one fresh conic problem
// per t. A maximize problem is handled as minimizing the negated objective,
// so levels and objective values refer to that form.
class FeasibilityFamily {
 public:
  FeasibilityFamily(Problem problem, const CanonOptions& o = {});

  ConstraintSet constraints_at(double t) const;
  ConicProblem generate(double t) const;
  // The original constraints alone.
  ConicProblem base() const;

  const Problem& problem() const { return problem_; }
  const Expr& objective() const { return objective_; }
  bool maximize() const { return problem_.sense() == Sense::maximize; }
  bool objective_integer_valued() const { return integer_; }
  const CanonOptions& options() const { return opts_; }

  double objective_value(const Assignment& x, const EvalOptions& e = {}) const;

 private:
  Problem problem_;
  CanonOptions opts_;
  Expr objective_;
  bool integer_ = false;
  ConstraintSet base_;
};

// Verifies the problem (VerificationError carrying the certificate on
// failure) and builds its feasibility family.
FeasibilityFamily dqcp2dcp(const Problem& p, const CanonOptions& o = {});

// Lowers one original constraint whose sides are certified DQCP.
ConstraintSet canonicalize_constraint(const Constraint& c, const CanonOptions& o = {});

// Human-readable listing of variables, cone blocks and rows.
std::string format_conic(const ConicProblem& p);

}  // namespace dqcp

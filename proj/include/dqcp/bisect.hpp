#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dqcp/canon.hpp"
#include "dqcp/solver.hpp"

namespace dqcp {

enum class InconclusivePolicy { treat_as_infeasible, abort };

struct BisectOptions {
  double eps = 1e-6;
  int max_probes = 100;
  std::optional<double> low;
  std::optional<double> high;
  InconclusivePolicy inconclusive = InconclusivePolicy::treat_as_infeasible;
  std::string solver = "barrier";
  SolverOptions solver_options;
  CanonOptions canon_options;
  // Final check of the original constraints.
  double recheck_tol = 1e-5;

  // Throws Error unless eps > 0, max_probes > 0 and low < high.
  void validate() const;
};

enum class SolveStatus { optimal, infeasible_problem, unbounded_below_suspected, aborted };

std::string_view to_string(SolveStatus s);
std::string_view to_string(InconclusivePolicy p);

// Result of one feasibility probe at level t.
struct Probe {
  FeasStatus status = FeasStatus::inconclusive;
  double fx = 0.0;  // objective at the returned point, when feasible
  Assignment x;
  int iterations = 0;
  double residual = 0.0;
  std::string message;
};

struct ProbeRecord {
  std::string phase;  // "base", "bracket" or "bisect"
  double t = 0.0;
  FeasStatus outcome = FeasStatus::inconclusive;
  double fx = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;
  std::string note;
};

// Interval and objective value refer to the minimized form; solve() maps
// them back for maximize problems.
struct SolveResult {
  SolveStatus status = SolveStatus::aborted;
  double value = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  Assignment assignment;
  std::vector<ProbeRecord> trace;
  std::string message;
  int bisect_probes = 0;
};

// Source of feasibility answers for the family t ↦ {f(x) ≤ t}.
class ProbeOracle {
 public:
  virtual ~ProbeOracle() = default;
  virtual Probe probe(double t) = 0;
  // The constraints without the objective bound.
  virtual Probe base() = 0;
  virtual bool integer_valued() const = 0;
};

class FamilyOracle final : public ProbeOracle {
 public:
  FamilyOracle(const FeasibilityFamily& family, const FeasibilitySolver& solver);
  Probe probe(double t) override;
  Probe base() override;
  bool integer_valued() const override { return family_.objective_integer_valued(); }

 private:
  Probe run(const ConicProblem& p, bool with_value);
  const FeasibilityFamily& family_;
  const FeasibilitySolver& solver_;
};

struct IntervalSearch {
  bool ok = false;
  SolveStatus failure = SolveStatus::aborted;  // meaningful when !ok
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<Probe> best;  // feasible point with the smallest objective seen
  std::string message;
};

// Base check, then doubling until α is infeasible and β feasible.
IntervalSearch find_initial_interval(ProbeOracle& oracle, const BisectOptions& opts,
                                     std::vector<ProbeRecord>& trace);

// Halving loop on a bracket from find_initial_interval.
SolveResult bisect(ProbeOracle& oracle, const IntervalSearch& interval, const BisectOptions& opts,
                   std::vector<ProbeRecord> trace = {});

// Verify, canonicalize, bracket, bisect and recheck the returned point
// against the original constraints. Throws VerificationError for non-DQCP
// problems.
SolveResult solve(const Problem& problem, const BisectOptions& opts = {});

// Largest violation of the original constraints and declared attributes at
// x; +inf when some expression cannot be evaluated there.
double constraint_violation(const Problem& problem, const Assignment& x, std::string* worst = nullptr);

}  // namespace dqcp

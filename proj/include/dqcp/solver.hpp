#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dqcp/conic_problem.hpp"

namespace dqcp {

struct SolverOptions {
  double eps_feas = 1e-7;
  double eps_gap = 1e-5;
  int max_iters = 20000;
  // Cones are shrunk by this much along an interior direction, so a point
  // accepted at eps_feas lies strictly inside the original cones.
  double interior_margin = 1e-6;
  // Dykstra's correction converges to the projection of the start point,
  // which is slower than plain alternating projections for feasibility.
  bool dykstra = false;
  // Anderson acceleration memory for plain projections; 0 disables it.
  int anderson = 10;
  // Infeasibility test: the displacement changed by less than stall_tol
  // (relative) over the last `window` iterations.
  int window = 100;
  double stall_tol = 1e-8;
};

enum class FeasStatus { feasible, infeasible, inconclusive };

std::string_view to_string(FeasStatus s);

struct FeasOutcome {
  FeasStatus status = FeasStatus::inconclusive;
  std::vector<double> x;  // set when feasible
  double residual = 0.0;  // distance from the affine iterate to the cones
  int iterations = 0;
  double gap_norm = 0.0;  // displacement norm when infeasible
  std::string message;
};

// Anything that decides "find x with A x + b ∈ K".
class FeasibilitySolver {
 public:
  virtual ~FeasibilitySolver() = default;
  virtual std::string_view name() const = 0;
  virtual FeasOutcome solve(const ConicProblem& p) const = 0;
};

// Built-in backends: "projection" (alternating projections) and "barrier"
// (phase-I interior-point method).
std::unique_ptr<FeasibilitySolver> make_solver(std::string_view name, const SolverOptions& opts = {});

// Alternating projections between {A x + b} and the cone product, with
// equality rows folded into the affine set. Throws SolverError on numerical
// breakdown.
FeasOutcome solve_feasibility(const ConicProblem& p, const SolverOptions& opts = {});

// Minimizes s subject to A x + b + s·e ∈ K with a log-barrier path, e an
// interior direction. Feasible once s < 0 (the point is strictly inside);
// infeasible on a dual vector y ∈ K* with Aᵀy = 0 and bᵀy < 0 whose
// separation exceeds eps_gap.
FeasOutcome solve_barrier(const ConicProblem& p, const SolverOptions& opts = {});

}  // namespace dqcp

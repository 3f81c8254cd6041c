#include "dqcp/bisect.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

#include "dqcp/error.hpp"

namespace dqcp {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible_problem: return "infeasible_problem";
    case SolveStatus::unbounded_below_suspected: return "unbounded_below_suspected";
    case SolveStatus::aborted: return "aborted";
  }
  return "?";
}

std::string_view to_string(InconclusivePolicy p) {
  return p == InconclusivePolicy::abort ? "abort" : "treat_as_infeasible";
}

void BisectOptions::validate() const {
  if (!(eps > 0)) throw Error("eps must be positive");
  if (max_probes <= 0) throw Error("max_probes must be positive");
  if (low && high && !(*low < *high)) throw Error("low must be below high");
}

FamilyOracle::FamilyOracle(const FeasibilityFamily& family, const FeasibilitySolver& solver)
    : family_(family), solver_(solver) {}

Probe FamilyOracle::run(const ConicProblem& p, bool with_value) {
  Probe out;
  FeasOutcome r;
  try {
    r = solver_.solve(p);
  } catch (const SolverError& e) {
    out.status = FeasStatus::inconclusive;
    out.message = e.what();
    return out;
  }
  out.status = r.status;
  out.iterations = r.iterations;
  out.residual = r.residual;
  out.message = r.message;
  if (r.status != FeasStatus::feasible) return out;
  out.x = p.extract(r.x);
  if (with_value) {
    try {
      out.fx = family_.objective_value(out.x, EvalOptions{1e-6});
    } catch (const DomainError& e) {
      out.fx = std::numeric_limits<double>::infinity();
      out.message = std::string("objective not evaluable at the point: ") + e.what();
    }
  }
  return out;
}

Probe FamilyOracle::probe(double t) { return run(family_.generate(t), true); }

Probe FamilyOracle::base() { return run(family_.base(), true); }

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

bool counts_as_feasible(const Probe& p) { return p.status == FeasStatus::feasible; }

ProbeRecord record(std::string phase, double t, const Probe& p, double alpha, double beta) {
  ProbeRecord r;
  r.phase = std::move(phase);
  r.t = t;
  r.outcome = p.status;
  r.fx = p.fx;
  r.alpha = alpha;
  r.beta = beta;
  r.iterations = p.iterations;
  r.note = p.message;
  return r;
}

void keep_best(std::optional<Probe>& best, const Probe& p) {
  if (!best || p.fx < best->fx) best = p;
}

}  // namespace

IntervalSearch find_initial_interval(ProbeOracle& oracle, const BisectOptions& opts,
                                     std::vector<ProbeRecord>& trace) {
  opts.validate();
  IntervalSearch s;
  const bool abort_on_inconclusive = opts.inconclusive == InconclusivePolicy::abort;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  const Probe base = oracle.base();
  trace.push_back(record("base", nan, base, nan, nan));
  if (base.status == FeasStatus::inconclusive && abort_on_inconclusive) {
    s.failure = SolveStatus::aborted;
    s.message = "base feasibility check inconclusive: " + base.message;
    return s;
  }
  if (!counts_as_feasible(base)) {
    s.failure = SolveStatus::infeasible_problem;
    s.message = "the constraints are infeasible";
    return s;
  }

  double alpha = opts.low.value_or(-1.0);
  double beta = opts.high.value_or(1.0);
  int used = 0;
  bool alpha_infeasible = false;

  // Raise β until feasible.
  for (;;) {
    const Probe p = oracle.probe(beta);
    ++used;
    if (p.status == FeasStatus::inconclusive && abort_on_inconclusive) {
      trace.push_back(record("bracket", beta, p, alpha, beta));
      s.failure = SolveStatus::aborted;
      s.message = "inconclusive probe at t = " + num(beta);
      return s;
    }
    if (counts_as_feasible(p)) {
      keep_best(s.best, p);
      const double t = beta;
      beta = std::min(beta, p.fx);
      trace.push_back(record("bracket", t, p, alpha, beta));
      break;
    }
    const double t = beta, width = beta - alpha;
    alpha = beta;
    alpha_infeasible = true;
    beta = beta > 0 ? 2.0 * beta : beta + width;
    trace.push_back(record("bracket", t, p, alpha, beta));
    if (used >= opts.max_probes) {
      s.failure = SolveStatus::aborted;
      s.message = "no feasible level found within max_probes";
      return s;
    }
  }

  // Lower α until infeasible.
  while (!alpha_infeasible) {
    if (alpha >= beta) {
      const double width = std::max(1.0, beta - alpha);
      alpha = beta < 0 ? 2.0 * beta : beta - width;
    }
    const Probe p = oracle.probe(alpha);
    ++used;
    if (p.status == FeasStatus::inconclusive && abort_on_inconclusive) {
      trace.push_back(record("bracket", alpha, p, alpha, beta));
      s.failure = SolveStatus::aborted;
      s.message = "inconclusive probe at t = " + num(alpha);
      return s;
    }
    if (!counts_as_feasible(p)) {
      trace.push_back(record("bracket", alpha, p, alpha, beta));
      break;
    }
    keep_best(s.best, p);
    const double t = alpha, width = beta - alpha;
    beta = std::min(alpha, p.fx);
    alpha = beta < 0 ? 2.0 * beta : beta - std::max(width, 1.0);
    trace.push_back(record("bracket", t, p, alpha, beta));
    if (used >= opts.max_probes) {
      s.failure = SolveStatus::unbounded_below_suspected;
      s.message = "objective still feasible at every level tried (last " + num(beta) + ")";
      s.alpha = alpha;
      s.beta = beta;
      return s;
    }
  }

  s.ok = true;
  s.alpha = alpha;
  s.beta = beta;
  return s;
}

SolveResult bisect(ProbeOracle& oracle, const IntervalSearch& interval, const BisectOptions& opts,
                   std::vector<ProbeRecord> trace) {
  opts.validate();
  SolveResult r;
  r.trace = std::move(trace);
  if (!interval.ok) {
    r.status = interval.failure;
    r.message = interval.message;
    r.alpha = interval.alpha;
    r.beta = interval.beta;
    if (interval.best) {
      r.assignment = interval.best->x;
      r.value = interval.best->fx;
    }
    return r;
  }

  const bool integer = oracle.integer_valued();
  double alpha = interval.alpha, beta = interval.beta;
  std::optional<Probe> best = interval.best;
  auto tighten = [&] {
    if (!integer) return;
    alpha = std::ceil(alpha);
    beta = std::floor(beta);
  };
  auto done = [&] { return integer ? alpha >= beta : beta - alpha <= opts.eps; };

  tighten();
  // Highest level with an infeasibility certificate; inconclusive levels
  // taken as infeasible can be contradicted later.
  double proven = alpha;
  int probes = 0;
  while (!done()) {
    if (probes >= opts.max_probes) {
      r.status = SolveStatus::aborted;
      r.message = "max_probes reached before the interval closed";
      break;
    }
    const double t = 0.5 * (alpha + beta);
    const Probe p = oracle.probe(t);
    ++probes;
    if (p.status == FeasStatus::feasible) {
      keep_best(best, p);
      if (p.fx < alpha) alpha = std::min(proven, p.fx);
      beta = std::max(alpha, std::min(t, p.fx));
    } else if (p.status == FeasStatus::infeasible) {
      alpha = proven = t;
    } else if (opts.inconclusive == InconclusivePolicy::treat_as_infeasible) {
      alpha = t;
    } else {
      r.trace.push_back(record("bisect", t, p, alpha, beta));
      r.status = SolveStatus::aborted;
      r.message = "inconclusive probe at t = " + num(t) + ": " + p.message;
      break;
    }
    tighten();
    r.trace.push_back(record("bisect", t, p, alpha, beta));
  }
  if (done()) r.status = SolveStatus::optimal;
  if (integer && alpha > beta) alpha = beta;

  r.bisect_probes = probes;
  r.alpha = alpha;
  r.beta = beta;
  if (best) {
    r.assignment = best->x;
    r.value = best->fx;
  } else if (r.status == SolveStatus::optimal) {
    r.status = SolveStatus::aborted;
    r.message = "no feasible point recorded";
  }
  return r;
}

double constraint_violation(const Problem& problem, const Assignment& x, std::string* worst) {
  const EvalOptions eo{1e-9};
  double v = 0.0;
  auto note = [&](double amount, const std::string& what) {
    if (amount > v || std::isnan(amount)) {
      v = std::isnan(amount) ? std::numeric_limits<double>::infinity() : amount;
      if (worst) *worst = what;
    }
  };
  for (const auto& c : problem.constraints()) {
    Value l, r;
    try {
      l = eval(c.lhs, x, eo);
      r = eval(c.rhs, x, eo);
    } catch (const Error& e) {
      note(std::numeric_limits<double>::infinity(), to_string(c) + ": " + e.what());
      continue;
    }
    const int n = static_cast<int>(std::max(l.size(), r.size()));
    for (int k = 0; k < n; ++k) {
      const double lk = l.size() == 1 ? l(0, 0) : flat(l, k);
      const double rk = r.size() == 1 ? r(0, 0) : flat(r, k);
      double amount = 0.0;
      switch (c.op) {
        case Relop::le: amount = lk - rk; break;
        case Relop::ge: amount = rk - lk; break;
        case Relop::eq: amount = std::abs(lk - rk); break;
      }
      note(amount, to_string(c));
    }
  }
  for (const auto& var : problem.variables()) {
    const VariableInfo& info = var.variable();
    const auto it = x.find(info.name);
    if (it == x.end()) {
      note(std::numeric_limits<double>::infinity(), info.name + " has no value");
      continue;
    }
    const Value& val = it->second;
    for (int k = 0; k < static_cast<int>(val.size()); ++k) {
      const double e = flat(val, k);
      if (!sign_contains(info.sign, e)) {
        note(std::abs(e), info.name + " violates its sign attribute");
      }
    }
    if (info.symmetric || info.psd) note((val - val.transpose()).cwiseAbs().maxCoeff(), info.name + " symmetry");
    if (info.psd) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (val + val.transpose()), Eigen::EigenvaluesOnly);
      note(-es.eigenvalues().minCoeff(), info.name + " positive semidefinite");
    }
  }
  return v;
}

SolveResult solve(const Problem& problem, const BisectOptions& opts) {
  opts.validate();
  const FeasibilityFamily family = dqcp2dcp(problem, opts.canon_options);
  const auto solver = make_solver(opts.solver, opts.solver_options);
  FamilyOracle oracle(family, *solver);

  BisectOptions inner = opts;
  if (family.maximize()) {
    // max f ≥ s ⟺ min −f ≤ −s, so the user's bounds swap and negate.
    inner.low = opts.high ? std::optional<double>(-*opts.high) : std::nullopt;
    inner.high = opts.low ? std::optional<double>(-*opts.low) : std::nullopt;
  }
  std::vector<ProbeRecord> trace;
  const IntervalSearch interval = find_initial_interval(oracle, inner, trace);
  SolveResult r = bisect(oracle, interval, inner, std::move(trace));

  if (r.status == SolveStatus::optimal) {
    std::string worst;
    const double viol = constraint_violation(problem, r.assignment, &worst);
    if (viol > opts.recheck_tol) {
      r.status = SolveStatus::aborted;
      r.message = "returned point violates the original problem by " + num(viol) + " (" + worst + ")";
    } else {
      const double slack = 1e-6;
      if (!(r.value >= r.alpha - slack && r.value <= r.beta + slack)) {
        r.status = SolveStatus::aborted;
        r.message = "objective value " + num(r.value) + " outside the final interval";
      }
    }
  }

  if (family.maximize()) {
    r.value = -r.value;
    const double a = r.alpha;
    r.alpha = -r.beta;
    r.beta = -a;
    for (auto& rec : r.trace) {
      rec.t = -rec.t;
      rec.fx = -rec.fx;
      const double ra = rec.alpha;
      rec.alpha = -rec.beta;
      rec.beta = -ra;
    }
  }
  return r;
}

}  // namespace dqcp

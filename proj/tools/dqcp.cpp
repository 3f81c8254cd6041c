#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dqcp/bisect.hpp"
#include "dqcp/canon.hpp"
#include "dqcp/document.hpp"
#include "dqcp/error.hpp"

namespace {

using nlohmann::ordered_json;

enum Exit { kOk = 0, kFailure = 1, kNotDqcp = 2, kBadInput = 3 };

// 12 significant digits; non-finite values become null.
ordered_json num(double v) {
  if (!std::isfinite(v)) return nullptr;
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return std::strtod(buf, nullptr);
}

ordered_json value_json(const dqcp::Value& v, const dqcp::Shape& s) {
  if (s.is_scalar()) return num(v(0, 0));
  ordered_json out = ordered_json::array();
  if (s.is_vector()) {
    for (int i = 0; i < s.rows; ++i) out.push_back(num(v(i, 0)));
    return out;
  }
  for (int i = 0; i < s.rows; ++i) {
    ordered_json row = ordered_json::array();
    for (int j = 0; j < s.cols; ++j) row.push_back(num(v(i, j)));
    out.push_back(row);
  }
  return out;
}

std::string indented(const std::string& text, const std::string& pad) {
  std::string out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out += pad + line + "\n";
  return out;
}

std::string verify_report(const dqcp::Problem& p, const dqcp::ProblemReport& r) {
  std::ostringstream out;
  out << "objective (" << to_string(p.sense()) << ")\n" << indented(format_certificate(r.objective), "  ");
  for (std::size_t i = 0; i < p.constraints().size(); ++i) {
    out << "constraint " << i + 1 << ": " << to_string(p.constraints()[i]) << "\n";
    out << "  lhs\n" << indented(format_certificate(r.lhs[i]), "    ");
    out << "  rhs\n" << indented(format_certificate(r.rhs[i]), "    ");
  }
  for (const auto& issue : r.issues) out << "issue: " << issue << "\n";
  out << "DQCP: " << (r.dqcp ? "yes" : "no") << "; DCP: " << (r.dcp ? "yes" : "no") << "\n";
  return out.str();
}

ordered_json result_json(const dqcp::Problem& p, const dqcp::SolveResult& r, const dqcp::BisectOptions& o) {
  ordered_json j;
  j["format"] = "dqcp-result";
  j["version"] = 1;
  j["status"] = std::string(to_string(r.status));
  j["sense"] = std::string(to_string(p.sense()));
  const bool has_point = !r.assignment.empty();
  j["value"] = has_point ? num(r.value) : ordered_json(nullptr);
  j["interval"] = {num(r.alpha), num(r.beta)};
  j["message"] = r.message;
  ordered_json vars = ordered_json::object();
  if (has_point) {
    for (const auto& v : p.variables()) {
      const auto& info = v.variable();
      auto it = r.assignment.find(info.name);
      vars[info.name] = it == r.assignment.end() ? ordered_json(nullptr) : value_json(it->second, info.shape);
    }
    j["max_violation"] = num(dqcp::constraint_violation(p, r.assignment));
  } else {
    j["max_violation"] = nullptr;
  }
  j["variables"] = vars;
  j["tolerances"] = {
      {"eps", num(o.eps)},
      {"eps_feas", num(o.solver_options.eps_feas)},
      {"recheck", num(o.recheck_tol)},
      {"strict_margin", num(o.canon_options.strict_margin)},
      {"psd_margin", num(o.canon_options.psd_margin)},
  };
  j["solver"] = o.solver;
  j["inconclusive"] = std::string(to_string(o.inconclusive));
  j["bisection_probes"] = r.bisect_probes;
  ordered_json trace = ordered_json::array();
  for (const auto& t : r.trace) {
    trace.push_back({
        {"phase", t.phase},
        {"t", num(t.t)},
        {"outcome", std::string(to_string(t.outcome))},
        {"objective", t.outcome == dqcp::FeasStatus::feasible ? num(t.fx) : ordered_json(nullptr)},
        {"alpha", num(t.alpha)},
        {"beta", num(t.beta)},
        {"iterations", t.iterations},
        {"note", t.note},
    });
  }
  j["trace"] = trace;
  return j;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw dqcp::Error("cannot write '" + path + "'");
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Verify, solve and canonicalize DQCP problem documents"};
  app.require_subcommand(1);

  std::string file;
  std::string output;

  auto* verify_cmd = app.add_subcommand("verify", "Print curvature certificates and the DQCP/DCP verdict");
  verify_cmd->add_option("file", file, "Problem document, or - for stdin")->required();
  verify_cmd->add_option("--output", output, "Write the report to this file");

  dqcp::DocumentOptions flags;
  std::string policy;
  auto* solve_cmd = app.add_subcommand("solve", "Solve by bisection and print a JSON result document");
  solve_cmd->add_option("file", file, "Problem document, or - for stdin")->required();
  solve_cmd->add_option("--eps", flags.eps, "Bisection tolerance on the interval width")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--low", flags.low, "Initial lower end of the interval");
  solve_cmd->add_option("--high", flags.high, "Initial upper end of the interval");
  solve_cmd->add_option("--max-probes", flags.max_probes, "Probe budget per phase")->check(CLI::PositiveNumber);
  solve_cmd->add_option("--max-iters", flags.max_iters, "Iteration budget of the feasibility solver")
      ->check(CLI::PositiveNumber);
  solve_cmd->add_option("--inconclusive", policy, "How to treat inconclusive probes")
      ->check(CLI::IsMember({"abort", "infeasible"}));
  solve_cmd->add_option("--solver", flags.solver, "Feasibility backend")
      ->check(CLI::IsMember({"barrier", "projection"}));
  solve_cmd->add_option("--output", output, "Write the result document to this file");

  double level = 0.0;
  std::string canon_solver;
  auto* canon_cmd = app.add_subcommand("canon", "Print the conic feasibility problem for one level");
  canon_cmd->add_option("file", file, "Problem document, or - for stdin")->required();
  canon_cmd->add_option("--t", level, "Level of the objective")->required();
  canon_cmd->add_option("--solver", canon_solver, "Also probe the level with this backend")
      ->check(CLI::IsMember({"barrier", "projection"}));
  canon_cmd->add_option("--output", output, "Write the dump to this file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kBadInput;
  }

  std::optional<dqcp::ProblemDocument> doc;
  try {
    doc.emplace(dqcp::read_document(file));
  } catch (const dqcp::ParseError& e) {
    std::cerr << "dqcp: " << (file == "-" ? "<stdin>" : file) << ":" << e.what() << "\n";
    return kBadInput;
  } catch (const dqcp::Error& e) {
    std::cerr << "dqcp: " << e.what() << "\n";
    return kBadInput;
  }
  const dqcp::Problem& problem = doc->problem;

  try {
    Output out(output);
    const dqcp::ProblemReport report = dqcp::verify(problem);

    if (verify_cmd->parsed()) {
      out.stream() << verify_report(problem, report);
      return report.dqcp ? kOk : kNotDqcp;
    }
    if (!report.dqcp) {
      std::cerr << "dqcp: the problem is not DQCP\n" << verify_report(problem, report);
      return kNotDqcp;
    }

    if (solve_cmd->parsed()) {
      if (!policy.empty()) {
        flags.inconclusive =
            policy == "abort" ? dqcp::InconclusivePolicy::abort : dqcp::InconclusivePolicy::treat_as_infeasible;
      }
      dqcp::BisectOptions opts;
      doc->options.apply(opts);
      flags.apply(opts);
      const dqcp::SolveResult r = dqcp::solve(problem, opts);
      out.stream() << result_json(problem, r, opts).dump(2) << "\n";
      return r.status == dqcp::SolveStatus::optimal ? kOk : kFailure;
    }

    const dqcp::FeasibilityFamily family = dqcp::dqcp2dcp(problem);
    const dqcp::ConicProblem cp = family.generate(family.maximize() ? -level : level);
    out.stream() << "level t = " << level << (family.maximize() ? " (objective >= t)" : " (objective <= t)")
                 << "\n"
                 << format_conic(cp);
    if (!canon_solver.empty()) {
      const dqcp::FeasOutcome o = dqcp::make_solver(canon_solver)->solve(cp);
      out.stream() << "probe (" << canon_solver << "): " << to_string(o.status);
      if (!o.message.empty()) out.stream() << " (" << o.message << ")";
      out.stream() << "\n";
    }
    return kOk;
  } catch (const dqcp::Error& e) {
    std::cerr << "dqcp: " << e.what() << "\n";
    return kFailure;
  }
}

#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "dqcp/analysis.hpp"
#include "dqcp/bisect.hpp"

namespace dqcp {

// Solve settings carried inside a problem document. Unset fields leave the
// BisectOptions defaults alone.
struct DocumentOptions {
  std::optional<double> eps;
  std::optional<double> low;
  std::optional<double> high;
  std::optional<int> max_probes;
  std::optional<int> max_iters;
  std::optional<InconclusivePolicy> inconclusive;
  std::optional<std::string> solver;

  void apply(BisectOptions& o) const;
  friend bool operator==(const DocumentOptions&, const DocumentOptions&) = default;
};

struct ProblemDocument {
  int version = 1;
  Problem problem;
  DocumentOptions options;
};

// Line-oriented problem format, see docs/problem-format.md. Every failure,
// including unknown atoms, dangling references and shape errors, is reported
// as a ParseError carrying the offending line and column.
ProblemDocument parse_document(std::string_view text);
// "-" reads standard input.
ProblemDocument read_document(const std::string& path);

std::string print_document(const Problem& p, const DocumentOptions& options = {});

// Same tree shape, atoms, parameters, variable attributes and constant
// values (bitwise).
bool structurally_equal(const Expr& a, const Expr& b);
bool structurally_equal(const Problem& a, const Problem& b);

}  // namespace dqcp

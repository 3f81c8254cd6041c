#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "dqcp/analysis.hpp"
#include "dqcp/bisect.hpp"
#include "dqcp/canon.hpp"

namespace dqcp::testing {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  double normal() { return std::normal_distribution<double>()(gen_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen_); }
  bool coin(double p = 0.5) { return uniform(0.0, 1.0) < p; }
  // A value admitted by `s`, away from zero except for the zero sign.
  double in_sign(Sign s, double scale = 3.0);
  Eigen::MatrixXd gaussian(int rows, int cols);
  Eigen::MatrixXd symmetric(int n);
  // Symmetric with eigenvalues in [lo, hi].
  Eigen::MatrixXd spd(int n, double lo, double hi);
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

// Cone membership of a user point: auxiliaries come from the witnesses.
bool member(const ConicProblem& p, const Assignment& x, double tol = 1e-9);
bool member(const ConstraintSet& s, const std::vector<Expr>& vars, const Assignment& x,
            const CanonOptions& o = {}, double tol = 1e-9);

struct SuiteReport {
  std::string name;
  long checks = 0;
  long failures = 0;
  long inconclusive = 0;
  std::vector<std::string> notes;  // first few failures

  void fail(std::string what);
  bool ok() const { return failures == 0 && checks > 0; }
  std::string summary() const;
};

// Reference problems.
Problem hello_world(bool y_positive = true);

struct GenEig {
  Expr x, y;
  Problem problem;
};
GenEig gen_eig();

struct MinLength {
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  double eps;
  Expr x;
  Problem problem;
};
MinLength min_length();
// Smallest j such that the best x supported on the first j coordinates
// has mean squared residual at most eps, by dense least squares.
int min_length_oracle(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double eps);

struct CurvatureCase {
  std::string name;
  Expr expr;
  bool quasiconvex;
  bool quasiconcave;
};
std::vector<CurvatureCase> curvature_table();

// DCP-compliant problems: a hand-written list plus randomly grown ones.
std::vector<Problem> dcp_corpus(int random_count, std::uint64_t seed);

// Property suites shared by the unit tests and the acceptance runner.
std::vector<SuiteReport> jensen_suite(int samples, double tol, std::uint64_t seed);
std::vector<SuiteReport> level_set_suite(int points, int levels, double band, std::uint64_t seed);
std::vector<SuiteReport> projection_suite(int samples, std::uint64_t seed);
// Wrong answers always fail; inconclusive answers fail only when
// `inconclusive_is_error` is set and are counted either way.
SuiteReport lp_suite(const std::string& solver, std::uint64_t seed, bool inconclusive_is_error = true);

// Oracle for the bisection driver: feasible exactly for t ≥ threshold.
class ThresholdOracle final : public ProbeOracle {
 public:
  ThresholdOracle(double threshold, bool integer, std::function<double(double)> value = {});
  Probe probe(double t) override;
  Probe base() override;
  bool integer_valued() const override { return integer_; }
  int calls = 0;
  std::vector<double> levels;

 private:
  double threshold_;
  bool integer_;
  std::function<double(double)> value_;
};

}  // namespace dqcp::testing

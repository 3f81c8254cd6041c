#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqcp/affine.hpp"
#include "dqcp/expr.hpp"

namespace dqcp {

enum class ConeKind { zero, nonneg, soc, rsoc, psd, exp };

std::string_view to_string(ConeKind k);

// One factor of the cone product.
//   zero(m)    {0}^m
//   nonneg(m)  R^m_+
//   soc(m)     {(t, x) : ‖x‖₂ ≤ t}, x ∈ R^{m-1}
//   rsoc(m)    {(u, v, w) : 2uv ≥ ‖w‖², u, v ≥ 0}, w ∈ R^{m-2}
//   psd(n)     n×n PSD matrices as n(n+1)/2 row-major lower-triangle
//              entries, off-diagonals scaled by √2
//   exp(k)     k copies of cl{(x, y, z) : y > 0, y·exp(x/y) ≤ z}
struct Cone {
  ConeKind kind = ConeKind::nonneg;
  int dim = 0;
  int order = 0;  // psd matrix order

  static Cone zero(int m) { return {ConeKind::zero, m, 0}; }
  static Cone nonneg(int m) { return {ConeKind::nonneg, m, 0}; }
  static Cone soc(int m) { return {ConeKind::soc, m, 0}; }
  static Cone rsoc(int m) { return {ConeKind::rsoc, m, 0}; }
  static Cone psd(int n) { return {ConeKind::psd, n * (n + 1) / 2, n}; }
  static Cone exp(int count) { return {ConeKind::exp, 3 * count, 0}; }

  std::string str() const;
};

struct ConeBlock {
  Cone cone;
  int offset = 0;
  std::string label;
};

// Solver coordinates of one user or auxiliary variable, row-major.
// Symmetric matrix variables map (i, j) and (j, i) to the same coordinate.
struct VarEntry {
  std::string name;
  Shape shape;
  bool aux = false;
  std::vector<int> coords;
};

// find x such that A x + b ∈ K.
struct ConicProblem {
  int num_vars = 0;
  Eigen::MatrixXd A;
  Eigen::VectorXd b;
  std::vector<ConeBlock> blocks;
  std::vector<VarEntry> variables;
  bool trivially_infeasible = false;
  std::string infeasible_reason;
  // Fill auxiliary coordinates from the ones already set, in order.
  std::vector<std::function<void(std::vector<double>&)>> witnesses;

  int num_rows() const { return static_cast<int>(b.size()); }
  const VarEntry* find_variable(std::string_view name) const;

  Assignment extract(std::span<const double> x) const;
  // Coordinates for the given user values, auxiliaries extended by their
  // defining atoms.
  std::vector<double> complete(const Assignment& user) const;
  Eigen::VectorXd slack(std::span<const double> x) const;
  // Euclidean distance of A x + b to K.
  double cone_distance(std::span<const double> x) const;
};

// Accumulates variables and cone rows, then produces the dense problem.
class ConicBuilder {
 public:
  AffineArray add_variable(const VariableInfo& info);
  AffineArray new_aux(const Shape& shape, std::string label);
  const std::vector<VarEntry>& variables() const { return vars_; }
  int num_vars() const { return num_coords_; }

  void add_zero(std::vector<LinExpr> rows, std::string label);
  void add_nonneg(std::vector<LinExpr> rows, std::string label);
  void add_soc(std::vector<LinExpr> rows, std::string label);
  void add_rsoc(std::vector<LinExpr> rows, std::string label);
  // Lower triangle of a square affine matrix; symmetry of the expression is
  // the caller's business.
  void add_psd(const AffineArray& matrix, std::string label);
  void add_exp(std::vector<LinExpr> x, std::vector<LinExpr> y, std::vector<LinExpr> z,
               std::string label);

  void add_witness(std::function<void(std::vector<double>&)> w) { witnesses_.push_back(std::move(w)); }
  void mark_infeasible(std::string reason);

  ConicProblem finish() &&;

 private:
  struct Pending {
    Cone cone;
    std::vector<LinExpr> rows;
    std::string label;
  };

  int num_coords_ = 0;
  int aux_count_ = 0;
  std::vector<VarEntry> vars_;
  std::vector<Pending> pending_;
  std::vector<std::function<void(std::vector<double>&)>> witnesses_;
  bool infeasible_ = false;
  std::string reason_;
};

}  // namespace dqcp

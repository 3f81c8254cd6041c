#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dqcp/shape.hpp"

namespace dqcp {

// Σ coef·x[index] + constant over solver coordinates. Terms are kept sorted
// by index with no duplicates.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  static LinExpr of_constant(double c);
  static LinExpr of_variable(int index, double coef = 1.0);

  bool is_constant() const { return terms.empty(); }
  double evaluate(std::span<const double> x) const;

  // this += scale * o
  LinExpr& add(const LinExpr& o, double scale = 1.0);
  LinExpr& scale_by(double c);

  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a.add(b); }
  friend LinExpr operator-(LinExpr a, const LinExpr& b) { return a.add(b, -1.0); }
  friend LinExpr operator*(double c, LinExpr a) { return a.scale_by(c); }
};

// Array of affine forms with an expression shape; entries are row-major.
struct AffineArray {
  Shape shape;
  std::vector<LinExpr> entries;

  static AffineArray zeros(const Shape& s);
  static AffineArray constant(const Value& v, const Shape& s);

  int size() const { return static_cast<int>(entries.size()); }
  LinExpr& operator[](int k) { return entries[static_cast<std::size_t>(k)]; }
  const LinExpr& operator[](int k) const { return entries[static_cast<std::size_t>(k)]; }
  const LinExpr& at(int i, int j) const { return entries[static_cast<std::size_t>(i * shape.cols + j)]; }
  // Scalars broadcast: entry k of a scalar array is its only entry.
  const LinExpr& bcast(int k) const { return size() == 1 ? entries[0] : (*this)[k]; }

  bool is_constant() const;
  Value constant_value() const;
  Value evaluate(std::span<const double> x) const;
};

}  // namespace dqcp

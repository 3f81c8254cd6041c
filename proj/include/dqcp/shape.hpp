#pragma once

#include <Eigen/Dense>
#include <string>

namespace dqcp {

struct Shape {
  enum class Kind { scalar, vector, matrix };

  Kind kind = Kind::scalar;
  int rows = 1;
  int cols = 1;

  static Shape scalar() { return {}; }
  static Shape vector(int n);
  static Shape matrix(int rows, int cols);

  bool is_scalar() const { return kind == Kind::scalar; }
  bool is_vector() const { return kind == Kind::vector; }
  bool is_matrix() const { return kind == Kind::matrix; }
  bool is_square() const { return kind == Kind::matrix && rows == cols; }
  int size() const { return rows * cols; }

  std::string str() const;

  friend bool operator==(const Shape&, const Shape&) = default;
};

// Numeric arrays are Eigen matrices: scalars are 1x1, vectors are n x 1.
// Flat indices are row-major throughout the library.
using Value = Eigen::MatrixXd;

Value make_value(const Shape& shape);
Value make_value(const Shape& shape, double fill);
Shape shape_of(const Value& v, Shape::Kind hint);

inline double& flat(Value& v, int k) { return v(k / v.cols(), k % v.cols()); }
inline double flat(const Value& v, int k) { return v(k / v.cols(), k % v.cols()); }

// Result shape of an elementwise operation; scalars broadcast against
// anything. Throws ShapeError on mismatch.
Shape broadcast(const Shape& a, const Shape& b);

}  // namespace dqcp

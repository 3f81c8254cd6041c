#include "dqcp/shape.hpp"

#include "dqcp/error.hpp"

namespace dqcp {

Shape Shape::vector(int n) {
  if (n < 1) throw ShapeError("vector length must be positive, got " + std::to_string(n));
  return {Kind::vector, n, 1};
}

Shape Shape::matrix(int rows, int cols) {
  if (rows < 1 || cols < 1) {
    throw ShapeError("matrix dimensions must be positive, got " + std::to_string(rows) + "x" +
                     std::to_string(cols));
  }
  return {Kind::matrix, rows, cols};
}

std::string Shape::str() const {
  switch (kind) {
    case Kind::scalar: return "scalar";
    case Kind::vector: return "vector(" + std::to_string(rows) + ")";
    case Kind::matrix: break;
  }
  return "matrix(" + std::to_string(rows) + "," + std::to_string(cols) + ")";
}

Value make_value(const Shape& shape) { return Value::Zero(shape.rows, shape.cols); }

Value make_value(const Shape& shape, double fill) {
  return Value::Constant(shape.rows, shape.cols, fill);
}

Shape shape_of(const Value& v, Shape::Kind hint) {
  if (hint == Shape::Kind::scalar && v.size() == 1) return Shape::scalar();
  if (hint != Shape::Kind::matrix && v.cols() == 1) return Shape::vector(static_cast<int>(v.rows()));
  return Shape::matrix(static_cast<int>(v.rows()), static_cast<int>(v.cols()));
}

Shape broadcast(const Shape& a, const Shape& b) {
  if (a.is_scalar()) return b;
  if (b.is_scalar()) return a;
  if (a == b) return a;
  throw ShapeError("incompatible shapes " + a.str() + " and " + b.str());
}

}  // namespace dqcp

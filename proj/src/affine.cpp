#include "dqcp/affine.hpp"

#include <algorithm>

namespace dqcp {

LinExpr LinExpr::of_constant(double c) {
  LinExpr e;
  e.constant = c;
  return e;
}

LinExpr LinExpr::of_variable(int index, double coef) {
  LinExpr e;
  if (coef != 0.0) e.terms.emplace_back(index, coef);
  return e;
}

double LinExpr::evaluate(std::span<const double> x) const {
  double s = constant;
  for (const auto& [i, c] : terms) s += c * x[static_cast<std::size_t>(i)];
  return s;
}

LinExpr& LinExpr::add(const LinExpr& o, double scale) {
  constant += scale * o.constant;
  if (o.terms.empty() || scale == 0.0) return *this;
  std::vector<std::pair<int, double>> merged;
  merged.reserve(terms.size() + o.terms.size());
  auto a = terms.begin();
  auto b = o.terms.begin();
  while (a != terms.end() || b != o.terms.end()) {
    if (b == o.terms.end() || (a != terms.end() && a->first < b->first)) {
      merged.push_back(*a++);
    } else if (a == terms.end() || b->first < a->first) {
      merged.emplace_back(b->first, scale * b->second);
      ++b;
    } else {
      const double c = a->second + scale * b->second;
      if (c != 0.0) merged.emplace_back(a->first, c);
      ++a;
      ++b;
    }
  }
  terms = std::move(merged);
  return *this;
}

LinExpr& LinExpr::scale_by(double c) {
  constant *= c;
  if (c == 0.0) {
    terms.clear();
    return *this;
  }
  for (auto& t : terms) t.second *= c;
  return *this;
}

AffineArray AffineArray::zeros(const Shape& s) {
  AffineArray a;
  a.shape = s;
  a.entries.resize(static_cast<std::size_t>(s.size()));
  return a;
}

AffineArray AffineArray::constant(const Value& v, const Shape& s) {
  AffineArray a = zeros(s);
  for (int k = 0; k < s.size(); ++k) a[k].constant = flat(v, k);
  return a;
}

bool AffineArray::is_constant() const {
  return std::all_of(entries.begin(), entries.end(), [](const LinExpr& e) { return e.is_constant(); });
}

Value AffineArray::constant_value() const {
  Value v = make_value(shape);
  for (int k = 0; k < size(); ++k) flat(v, k) = (*this)[k].constant;
  return v;
}

Value AffineArray::evaluate(std::span<const double> x) const {
  Value v = make_value(shape);
  for (int k = 0; k < size(); ++k) flat(v, k) = (*this)[k].evaluate(x);
  return v;
}

}  // namespace dqcp

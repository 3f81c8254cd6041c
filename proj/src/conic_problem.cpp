#include "dqcp/conic_problem.hpp"

#include <cmath>

#include "dqcp/cones.hpp"
#include "dqcp/error.hpp"

namespace dqcp {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

std::string_view to_string(ConeKind k) {
  switch (k) {
    case ConeKind::zero: return "zero";
    case ConeKind::nonneg: return "nonneg";
    case ConeKind::soc: return "soc";
    case ConeKind::rsoc: return "rsoc";
    case ConeKind::psd: return "psd";
    case ConeKind::exp: return "exp";
  }
  return "?";
}

std::string Cone::str() const {
  const int n = kind == ConeKind::psd ? order : kind == ConeKind::exp ? dim / 3 : dim;
  return std::string(to_string(kind)) + "(" + std::to_string(n) + ")";
}

const VarEntry* ConicProblem::find_variable(std::string_view name) const {
  for (const auto& v : variables) {
    if (v.name == name) return &v;
  }
  return nullptr;
}

Assignment ConicProblem::extract(std::span<const double> x) const {
  Assignment out;
  for (const auto& v : variables) {
    if (v.aux) continue;
    Value val = make_value(v.shape);
    for (int k = 0; k < v.shape.size(); ++k) flat(val, k) = x[static_cast<std::size_t>(v.coords[k])];
    out.emplace(v.name, std::move(val));
  }
  return out;
}

std::vector<double> ConicProblem::complete(const Assignment& user) const {
  std::vector<double> x(static_cast<std::size_t>(num_vars), 0.0);
  for (const auto& v : variables) {
    if (v.aux) continue;
    auto it = user.find(v.name);
    if (it == user.end()) throw Error("no value for variable '" + v.name + "'");
    if (it->second.size() != v.shape.size()) {
      throw ShapeError("value for '" + v.name + "' does not match " + v.shape.str());
    }
    for (int k = 0; k < v.shape.size(); ++k) x[static_cast<std::size_t>(v.coords[k])] = flat(it->second, k);
  }
  for (const auto& w : witnesses) w(x);
  return x;
}

Eigen::VectorXd ConicProblem::slack(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  return A * xv + b;
}

double ConicProblem::cone_distance(std::span<const double> x) const {
  const Eigen::VectorXd s = slack(x);
  double sq = 0.0;
  for (const auto& blk : blocks) {
    const Eigen::VectorXd part = s.segment(blk.offset, blk.cone.dim);
    sq += (part - project(blk.cone, part)).squaredNorm();
  }
  return std::sqrt(sq);
}

AffineArray ConicBuilder::add_variable(const VariableInfo& info) {
  for (const auto& v : vars_) {
    if (v.name == info.name) throw NameCollisionError("variable '" + info.name + "' declared twice");
  }
  VarEntry entry{info.name, info.shape, false, {}};
  const int rows = info.shape.rows, cols = info.shape.cols;
  entry.coords.assign(static_cast<std::size_t>(rows * cols), -1);
  const bool sym = info.symmetric || info.psd;
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      auto& c = entry.coords[static_cast<std::size_t>(i * cols + j)];
      if (sym && j > i) continue;
      c = num_coords_++;
      if (sym) entry.coords[static_cast<std::size_t>(j * cols + i)] = c;
    }
  }
  AffineArray out = AffineArray::zeros(info.shape);
  for (int k = 0; k < out.size(); ++k) out[k] = LinExpr::of_variable(entry.coords[static_cast<std::size_t>(k)]);
  vars_.push_back(std::move(entry));
  return out;
}

AffineArray ConicBuilder::new_aux(const Shape& shape, std::string label) {
  VarEntry entry{"aux" + std::to_string(aux_count_++) + "." + label, shape, true, {}};
  AffineArray out = AffineArray::zeros(shape);
  for (int k = 0; k < shape.size(); ++k) {
    entry.coords.push_back(num_coords_);
    out[k] = LinExpr::of_variable(num_coords_++);
  }
  vars_.push_back(std::move(entry));
  return out;
}

void ConicBuilder::add_zero(std::vector<LinExpr> rows, std::string label) {
  if (rows.empty()) return;
  const int m = static_cast<int>(rows.size());
  pending_.push_back({Cone::zero(m), std::move(rows), std::move(label)});
}

void ConicBuilder::add_nonneg(std::vector<LinExpr> rows, std::string label) {
  if (rows.empty()) return;
  const int m = static_cast<int>(rows.size());
  pending_.push_back({Cone::nonneg(m), std::move(rows), std::move(label)});
}

void ConicBuilder::add_soc(std::vector<LinExpr> rows, std::string label) {
  if (rows.empty()) throw ShapeError("soc block needs at least one row");
  const int m = static_cast<int>(rows.size());
  pending_.push_back({Cone::soc(m), std::move(rows), std::move(label)});
}

void ConicBuilder::add_rsoc(std::vector<LinExpr> rows, std::string label) {
  if (rows.size() < 2) throw ShapeError("rsoc block needs at least two rows");
  const int m = static_cast<int>(rows.size());
  pending_.push_back({Cone::rsoc(m), std::move(rows), std::move(label)});
}

void ConicBuilder::add_psd(const AffineArray& matrix, std::string label) {
  const int n = matrix.shape.rows;
  if (matrix.shape.cols != n) throw ShapeError("psd block needs a square matrix, got " + matrix.shape.str());
  std::vector<LinExpr> rows;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= i; ++j) {
      LinExpr e = matrix.at(i, j);
      if (i != j) e.scale_by(kSqrt2);
      rows.push_back(std::move(e));
    }
  }
  pending_.push_back({Cone::psd(n), std::move(rows), std::move(label)});
}

void ConicBuilder::add_exp(std::vector<LinExpr> x, std::vector<LinExpr> y, std::vector<LinExpr> z,
                           std::string label) {
  if (x.size() != y.size() || x.size() != z.size()) throw ShapeError("exp block arguments differ in size");
  if (x.empty()) return;
  std::vector<LinExpr> rows;
  for (std::size_t k = 0; k < x.size(); ++k) {
    rows.push_back(std::move(x[k]));
    rows.push_back(std::move(y[k]));
    rows.push_back(std::move(z[k]));
  }
  const int count = static_cast<int>(x.size());
  pending_.push_back({Cone::exp(count), std::move(rows), std::move(label)});
}

void ConicBuilder::mark_infeasible(std::string reason) {
  if (!infeasible_) reason_ = std::move(reason);
  infeasible_ = true;
}

ConicProblem ConicBuilder::finish() && {
  ConicProblem p;
  p.num_vars = num_coords_;
  int m = 0;
  for (const auto& pb : pending_) m += pb.cone.dim;
  p.A = Eigen::MatrixXd::Zero(m, num_coords_);
  p.b = Eigen::VectorXd::Zero(m);
  int row = 0;
  for (auto& pb : pending_) {
    p.blocks.push_back({pb.cone, row, std::move(pb.label)});
    for (const auto& e : pb.rows) {
      for (const auto& [j, c] : e.terms) p.A(row, j) += c;
      p.b(row) = e.constant;
      ++row;
    }
  }
  p.variables = std::move(vars_);
  p.trivially_infeasible = infeasible_;
  p.infeasible_reason = std::move(reason_);
  p.witnesses = std::move(witnesses_);
  return p;
}

}  // namespace dqcp

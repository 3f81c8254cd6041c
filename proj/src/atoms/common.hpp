#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "dqcp/affine.hpp"
#include "dqcp/atom.hpp"
#include "dqcp/conic_problem.hpp"
#include "dqcp/error.hpp"

namespace dqcp::atoms {

void register_affine(std::vector<const Atom*>& out);
void register_convex(std::vector<const Atom*>& out);
void register_concave(std::vector<const Atom*>& out);
void register_quasi(std::vector<const Atom*>& out);
void register_integer(std::vector<const Atom*>& out);

inline bool may_be_negative(Sign s) { return sign_contains(s, -1.0); }
inline bool may_be_zero(Sign s) { return sign_contains(s, 0.0); }
inline bool may_be_positive(Sign s) { return sign_contains(s, 1.0); }

Sign sign_from(bool neg, bool zero, bool pos);
// Sign of |v| and of v² given the sign of v.
Sign sign_abs(Sign s);
// Sign of max(a, b) / min(a, b).
Sign sign_max(Sign a, Sign b);
Sign sign_min(Sign a, Sign b);

// Nondecreasing on nonnegative arguments, nonincreasing on nonpositive ones.
Monotonicity mono_even(Sign s);
// Nondecreasing when `s` is nonnegative, nonincreasing when nonpositive.
Monotonicity mono_times(Sign s);

[[noreturn]] void shape_fail(std::string_view atom, const std::string& msg);

Shape broadcast_all(std::string_view atom, std::span<const Expr> args);
void require_scalar(std::string_view atom, const Expr& e, const char* what);
void require_constant(std::string_view atom, const AtomArgs& a, std::size_t i);

Value map_values(const Value& v, const std::function<double(double)>& f);
// Elementwise over broadcast operands.
Value zip_values(const Value& a, const Value& b, const std::function<double(double, double)>& f);

double eval_lin(const LinExpr& e, const std::vector<double>& x);
std::function<double(const std::vector<double>&)> lin_eval_fn(const LinExpr& e);

// Registers `out[k] := f(arg values)` for every entry of an auxiliary array.
void witness_elementwise(ConicBuilder& b, const AffineArray& out,
                         std::vector<const AffineArray*> args,
                         std::function<double(std::span<const double>)> f);

inline std::vector<LinExpr> rows_of(const AffineArray& a) { return a.entries; }

// Expression helpers for canonicalizers.
Expr cst(double v);
Expr scaled(double c, const Expr& e);
Expr sum_exprs(std::vector<Expr> terms);
Expr negated(const Expr& e);

double odd_root(double t, long p);

}  // namespace dqcp::atoms

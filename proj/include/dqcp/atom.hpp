#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dqcp/constraint.hpp"
#include "dqcp/curvature.hpp"
#include "dqcp/expr.hpp"

namespace dqcp {

class ConicBuilder;
struct AffineArray;

enum class Monotonicity { nondecreasing, nonincreasing, none };

std::string_view to_string(Monotonicity m);

// Arguments of one atom application as seen by the atom's rules.
struct AtomArgs {
  std::span<const Expr> args;
  std::span<const long> params;

  std::size_t size() const { return args.size(); }
  const Expr& operator[](std::size_t i) const { return args[i]; }
  Sign sign(std::size_t i) const { return args[i].sign(); }
  bool is_constant(std::size_t i) const { return args[i].is_constant(); }
  Value constant(std::size_t i) const { return constant_value(args[i]); }
  double scalar_constant(std::size_t i) const { return constant(i)(0, 0); }
};

// Curvature of the atom *as a function of its arguments*, restricted to the
// region fixed by the argument signs. `note` says why a flag is missing when
// it depends on a sign hypothesis, e.g. "denominator must be positive".
struct AtomCurvature {
  CurvatureFlags flags;
  std::string note;
};

// Metadata and behavior of one library function. Atoms are stateless
// singletons owned by the registry.
class Atom {
 public:
  virtual ~Atom() = default;

  virtual std::string_view name() const = 0;
  // Expression arguments; max_args() < 0 means variadic.
  virtual int min_args() const { return 1; }
  virtual int max_args() const { return 1; }
  // Integer parameters following the expression arguments.
  virtual int min_params() const { return 0; }
  virtual int max_params() const { return 0; }

  // Output shape; validates argument shapes and parameters (ShapeError).
  virtual Shape shape(const AtomArgs& a) const = 0;
  virtual Sign sign(const AtomArgs& a) const = 0;
  virtual AtomCurvature curvature(const AtomArgs& a) const = 0;
  virtual Monotonicity monotonicity(const AtomArgs& a, std::size_t i) const = 0;
  virtual bool integer_valued() const { return false; }
  // Curvature can be certified but no level set is conic-representable.
  virtual bool analysis_only() const { return false; }

  virtual Value evaluate(std::span<const Value> args, std::span<const long> params,
                         const EvalOptions& opts) const = 0;

  // Linear atoms (possibly only when some arguments are constant) are
  // lowered exactly instead of through a graph implementation.
  virtual bool is_linear(const AtomArgs& /*a*/) const { return false; }
  virtual AffineArray lower_linear(const AtomArgs& a, std::span<const AffineArray> args) const;

  // Conic graph: epigraph atom(args) ≤ out for convex atoms, hypograph
  // atom(args) ≥ out for concave ones. Throws UnsupportedAtomError when the
  // atom has none.
  virtual bool has_graph() const { return false; }
  virtual void graph(ConicBuilder& b, const AtomArgs& a, std::span<const AffineArray> args,
                     const AffineArray& out, bool epigraph) const;

  // atom(args) ≤ t (resp. ≥ t) as DCP constraints in the arguments, valid
  // whenever the argument curvatures satisfy the composition hypotheses.
  virtual bool has_sublevel() const { return false; }
  virtual bool has_superlevel() const { return false; }
  virtual ConstraintSet sublevel(const AtomArgs& a, double t, const CanonOptions& o) const;
  virtual ConstraintSet superlevel(const AtomArgs& a, double t, const CanonOptions& o) const;

  // Monotone scalar maps: {v : atom(.., v, ..) ≤ t} for the single
  // non-constant argument `i`, with every other argument held constant.
  virtual std::optional<Preimage> sublevel_preimage(const AtomArgs& /*a*/, std::size_t /*i*/,
                                                    double /*t*/,
                                                    const CanonOptions& /*o*/) const {
    return std::nullopt;
  }
  virtual std::optional<Preimage> superlevel_preimage(const AtomArgs& /*a*/, std::size_t /*i*/,
                                                      double /*t*/,
                                                      const CanonOptions& /*o*/) const {
    return std::nullopt;
  }
};

// The atom registry. Immutable after first use.
const Atom* find_atom(std::string_view name);
const Atom& atom(std::string_view name);  // throws UnknownAtomError
std::span<const Atom* const> registry();

}  // namespace dqcp

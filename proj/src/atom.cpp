#include "dqcp/atom.hpp"

#include <algorithm>

#include "atoms/common.hpp"
#include "dqcp/affine.hpp"
#include "dqcp/error.hpp"

namespace dqcp {

std::string_view to_string(Monotonicity m) {
  switch (m) {
    case Monotonicity::nondecreasing: return "nondecreasing";
    case Monotonicity::nonincreasing: return "nonincreasing";
    case Monotonicity::none: return "none";
  }
  return "?";
}

AffineArray Atom::lower_linear(const AtomArgs& /*a*/, std::span<const AffineArray> /*args*/) const {
  throw UnsupportedAtomError(std::string(name()) + " is not linear in its arguments");
}

void Atom::graph(ConicBuilder& /*b*/, const AtomArgs& /*a*/, std::span<const AffineArray> /*args*/,
                 const AffineArray& /*out*/, bool /*epigraph*/) const {
  throw UnsupportedAtomError(std::string(name()) + " has no conic graph implementation");
}

ConstraintSet Atom::sublevel(const AtomArgs& /*a*/, double /*t*/, const CanonOptions& /*o*/) const {
  if (analysis_only()) {
    throw NoRepresentationError(std::string(name()) + " has no conic representation of its level sets");
  }
  throw NoRepresentationError(std::string(name()) + " has no sublevel-set canonicalizer");
}

ConstraintSet Atom::superlevel(const AtomArgs& /*a*/, double /*t*/, const CanonOptions& /*o*/) const {
  if (analysis_only()) {
    throw NoRepresentationError(std::string(name()) + " has no conic representation of its level sets");
  }
  throw NoRepresentationError(std::string(name()) + " has no superlevel-set canonicalizer");
}

namespace {

std::vector<const Atom*> build_registry() {
  std::vector<const Atom*> all;
  atoms::register_affine(all);
  atoms::register_convex(all);
  atoms::register_concave(all);
  atoms::register_quasi(all);
  atoms::register_integer(all);
  std::sort(all.begin(), all.end(), [](const Atom* a, const Atom* b) { return a->name() < b->name(); });
  return all;
}

const std::vector<const Atom*>& registry_storage() {
  static const std::vector<const Atom*> all = build_registry();
  return all;
}

}  // namespace

const Atom* find_atom(std::string_view name) {
  const auto& all = registry_storage();
  auto it = std::lower_bound(all.begin(), all.end(), name,
                             [](const Atom* a, std::string_view n) { return a->name() < n; });
  if (it != all.end() && (*it)->name() == name) return *it;
  return nullptr;
}

const Atom& atom(std::string_view name) {
  if (const Atom* a = find_atom(name)) return *a;
  throw UnknownAtomError("unknown atom '" + std::string(name) + "'");
}

std::span<const Atom* const> registry() { return registry_storage(); }

}  // namespace dqcp

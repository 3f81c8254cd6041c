#pragma once

#include <string>

namespace dqcp {

// Membership flags rather than a single enum: an affine expression is at the
// same time convex, concave, quasiconvex and quasiconcave.
struct CurvatureFlags {
  bool is_constant = false;
  bool is_affine = false;
  bool is_convex = false;
  bool is_concave = false;
  bool is_quasiconvex = false;
  bool is_quasiconcave = false;

  static CurvatureFlags constant();
  static CurvatureFlags affine();
  static CurvatureFlags convex();
  static CurvatureFlags concave();
  static CurvatureFlags quasiconvex();
  static CurvatureFlags quasiconcave();
  static CurvatureFlags quasilinear();
  static CurvatureFlags unknown() { return {}; }

  // Closes the flags under constant ⇒ affine ⇒ convex ∧ concave,
  // convex ⇒ quasiconvex, concave ⇒ quasiconcave, convex ∧ concave ⇒ affine.
  CurvatureFlags& normalize();

  bool is_quasilinear() const { return is_quasiconvex && is_quasiconcave; }
  bool any() const { return is_quasiconvex || is_quasiconcave; }

  CurvatureFlags& operator|=(const CurvatureFlags& o);
  friend CurvatureFlags operator|(CurvatureFlags a, const CurvatureFlags& b) { return a |= b; }
  friend bool operator==(const CurvatureFlags&, const CurvatureFlags&) = default;

  // Strongest single label: constant, affine, convex, concave, quasilinear,
  // quasiconvex, quasiconcave or unknown.
  std::string str() const;
};

}  // namespace dqcp

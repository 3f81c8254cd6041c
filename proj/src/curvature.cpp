#include "dqcp/curvature.hpp"

namespace dqcp {

CurvatureFlags CurvatureFlags::constant() {
  CurvatureFlags f;
  f.is_constant = true;
  return f.normalize();
}

CurvatureFlags CurvatureFlags::affine() {
  CurvatureFlags f;
  f.is_affine = true;
  return f.normalize();
}

CurvatureFlags CurvatureFlags::convex() {
  CurvatureFlags f;
  f.is_convex = true;
  return f.normalize();
}

CurvatureFlags CurvatureFlags::concave() {
  CurvatureFlags f;
  f.is_concave = true;
  return f.normalize();
}

CurvatureFlags CurvatureFlags::quasiconvex() {
  CurvatureFlags f;
  f.is_quasiconvex = true;
  return f;
}

CurvatureFlags CurvatureFlags::quasiconcave() {
  CurvatureFlags f;
  f.is_quasiconcave = true;
  return f;
}

CurvatureFlags CurvatureFlags::quasilinear() {
  CurvatureFlags f;
  f.is_quasiconvex = f.is_quasiconcave = true;
  return f;
}

CurvatureFlags& CurvatureFlags::normalize() {
  if (is_constant) is_affine = true;
  if (is_convex && is_concave) is_affine = true;
  if (is_affine) is_convex = is_concave = true;
  if (is_convex) is_quasiconvex = true;
  if (is_concave) is_quasiconcave = true;
  return *this;
}

CurvatureFlags& CurvatureFlags::operator|=(const CurvatureFlags& o) {
  is_constant |= o.is_constant;
  is_affine |= o.is_affine;
  is_convex |= o.is_convex;
  is_concave |= o.is_concave;
  is_quasiconvex |= o.is_quasiconvex;
  is_quasiconcave |= o.is_quasiconcave;
  return normalize();
}

std::string CurvatureFlags::str() const {
  if (is_constant) return "constant";
  if (is_affine) return "affine";
  if (is_convex) return "convex";
  if (is_concave) return "concave";
  if (is_quasiconvex && is_quasiconcave) return "quasilinear";
  if (is_quasiconvex) return "quasiconvex";
  if (is_quasiconcave) return "quasiconcave";
  return "unknown";
}

}  // namespace dqcp

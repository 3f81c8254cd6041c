#include "dqcp/analysis.hpp"

#include <cmath>
#include <unordered_map>

#include "dqcp/atom.hpp"
#include "dqcp/error.hpp"

namespace dqcp {

std::string_view to_string(Rule r) {
  switch (r) {
    case Rule::leaf: return "leaf";
    case Rule::dcp_composition: return "dcp-composition";
    case Rule::quasi_composition: return "quasi-composition";
    case Rule::monotone_of_quasi: return "monotone-of-quasi";
    case Rule::max_of_qcvx: return "max-of-qcvx";
    case Rule::min_of_qccv: return "min-of-qccv";
    case Rule::none: return "none";
  }
  return "?";
}

std::string_view to_string(Sense s) { return s == Sense::minimize ? "minimize" : "maximize"; }

std::string_view to_string(Relop r) {
  switch (r) {
    case Relop::le: return "<=";
    case Relop::ge: return ">=";
    case Relop::eq: return "==";
  }
  return "?";
}

std::string to_string(const Constraint& c) {
  return to_string(c.lhs) + " " + std::string(to_string(c.op)) + " " + to_string(c.rhs);
}

namespace {

struct Entry {
  CurvatureFlags flags;
  Rule rule = Rule::none;
  std::string failure;
};

// What argument i must be for the composition rules: convex where the atom
// is nondecreasing, concave where nonincreasing, affine otherwise (and the
// mirror image for the concave side).
const char* requirement(Monotonicity m, bool convex_side) {
  switch (m) {
    case Monotonicity::nondecreasing: return convex_side ? "convex" : "concave";
    case Monotonicity::nonincreasing: return convex_side ? "concave" : "convex";
    case Monotonicity::none: return "affine";
  }
  return "affine";
}

bool satisfies(const CurvatureFlags& c, Monotonicity m, bool convex_side) {
  switch (m) {
    case Monotonicity::nondecreasing: return convex_side ? c.is_convex : c.is_concave;
    case Monotonicity::nonincreasing: return convex_side ? c.is_concave : c.is_convex;
    case Monotonicity::none: return c.is_affine;
  }
  return false;
}

class Analyzer {
 public:
  const Entry& analyze(const Expr& e) {
    if (auto it = memo_.find(e.node_id()); it != memo_.end()) return it->second;
    Entry entry = compute(e);
    return memo_.emplace(e.node_id(), std::move(entry)).first->second;
  }

  CurvatureCertificate certify(const Expr& e) {
    const Entry& en = analyze(e);
    CurvatureCertificate c;
    c.shape = e.shape();
    c.sign = e.sign();
    c.flags = en.flags;
    c.rule = en.rule;
    c.failure = en.failure;
    if (e.is_atom()) {
      c.label = std::string(e.atom().name());
      for (const auto& ch : e.children()) c.children.push_back(certify(ch));
    } else {
      c.label = to_string(e);
    }
    return c;
  }

 private:
  Entry compute(const Expr& e) {
    if (e.is_variable()) return {CurvatureFlags::affine(), Rule::leaf, ""};
    if (e.is_constant_leaf()) return {CurvatureFlags::constant(), Rule::leaf, ""};

    const Atom& atom = e.atom();
    const AtomArgs a{e.children(), e.params()};
    std::vector<const Entry*> kids;
    for (const auto& ch : e.children()) kids.push_back(&analyze(ch));
    if (e.is_constant()) return {CurvatureFlags::constant(), Rule::dcp_composition, ""};

    const AtomCurvature h = atom.curvature(a);
    bool convex_ok = true, concave_ok = true;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.is_constant(i)) continue;
      const Monotonicity m = atom.monotonicity(a, i);
      convex_ok = convex_ok && satisfies(kids[i]->flags, m, true);
      concave_ok = concave_ok && satisfies(kids[i]->flags, m, false);
    }

    Entry out;
    auto contribute = [&](const CurvatureFlags& add, Rule r) {
      const CurvatureFlags before = out.flags;
      out.flags |= add;
      if (out.flags != before && out.rule == Rule::none) out.rule = r;
    };

    if (h.flags.is_convex && convex_ok) contribute(CurvatureFlags::convex(), Rule::dcp_composition);
    if (h.flags.is_concave && concave_ok) contribute(CurvatureFlags::concave(), Rule::dcp_composition);

    const bool scalar = e.shape().is_scalar();
    if (scalar) {
      if (h.flags.is_quasiconvex && convex_ok) contribute(CurvatureFlags::quasiconvex(), Rule::quasi_composition);
      if (h.flags.is_quasiconcave && concave_ok) contribute(CurvatureFlags::quasiconcave(), Rule::quasi_composition);

      int free_arg = -1, free_count = 0;
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a.is_constant(i)) {
          free_arg = static_cast<int>(i);
          ++free_count;
        }
      }
      if (free_count == 1 && a[static_cast<std::size_t>(free_arg)].shape().is_scalar()) {
        const auto i = static_cast<std::size_t>(free_arg);
        const Monotonicity m = atom.monotonicity(a, i);
        const CurvatureFlags& c = kids[i]->flags;
        if (m == Monotonicity::nondecreasing) {
          if (c.is_quasiconvex) contribute(CurvatureFlags::quasiconvex(), Rule::monotone_of_quasi);
          if (c.is_quasiconcave) contribute(CurvatureFlags::quasiconcave(), Rule::monotone_of_quasi);
        } else if (m == Monotonicity::nonincreasing) {
          if (c.is_quasiconcave) contribute(CurvatureFlags::quasiconvex(), Rule::monotone_of_quasi);
          if (c.is_quasiconvex) contribute(CurvatureFlags::quasiconcave(), Rule::monotone_of_quasi);
        }
      }

      const std::string_view name = atom.name();
      if (name == "maximum" || name == "max" || name == "minimum" || name == "min") {
        const bool is_max = name == "maximum" || name == "max";
        bool all = true;
        for (const auto* k : kids) all = all && (is_max ? k->flags.is_quasiconvex : k->flags.is_quasiconcave);
        if (all) {
          if (is_max) contribute(CurvatureFlags::quasiconvex(), Rule::max_of_qcvx);
          else contribute(CurvatureFlags::quasiconcave(), Rule::min_of_qccv);
        }
      }
    }

    if (!out.flags.any()) out.failure = explain(e, a, h, kids, scalar);
    return out;
  }

  static std::string explain(const Expr& e, const AtomArgs& a, const AtomCurvature& h,
                             const std::vector<const Entry*>& kids, bool scalar) {
    const std::string name(e.atom().name());
    const CurvatureFlags& f = h.flags;
    if (!f.any()) {
      return name + ": " + (h.note.empty() ? "no curvature under the argument signs" : h.note);
    }
    const bool convex_side = f.is_quasiconvex;
    if (!scalar && !f.is_convex && !f.is_concave) {
      return name + ": quasi-curvature is defined for scalar expressions only";
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a.is_constant(i)) continue;
      const Monotonicity m = e.atom().monotonicity(a, i);
      if (!satisfies(kids[i]->flags, m, convex_side)) {
        return name + ": argument " + std::to_string(i) + " must be " + requirement(m, convex_side) + " (" + name +
               " is " + std::string(to_string(m)) + " in it under the argument signs), but it is " +
               kids[i]->flags.str();
      }
    }
    return name + ": composition rules do not apply";
  }

  std::unordered_map<const void*, Entry> memo_;
};

void format_into(const CurvatureCertificate& c, int depth, std::string& out) {
  out.append(static_cast<std::size_t>(2 * depth), ' ');
  out += c.label + "  " + c.flags.str() + "  [" + std::string(to_string(c.rule)) + "]  sign=" +
         std::string(to_string(c.sign));
  if (!c.failure.empty()) out += "  !! " + c.failure;
  out += "\n";
  for (const auto& ch : c.children) format_into(ch, depth + 1, out);
}

}  // namespace

CurvatureFlags curvature_of(const Expr& e) {
  Analyzer an;
  return an.analyze(e).flags;
}

CurvatureCertificate certify(const Expr& e) {
  Analyzer an;
  return an.certify(e);
}

std::string format_certificate(const CurvatureCertificate& c) {
  std::string out;
  format_into(c, 0, out);
  return out;
}

bool is_integer_valued(const Expr& e) {
  if (e.is_variable()) return false;
  if (e.is_constant_leaf()) {
    const Value& v = e.value();
    return (v.array() == v.array().round()).all();
  }
  const Atom& atom = e.atom();
  if (atom.integer_valued()) return true;
  const std::string_view name = atom.name();
  if (name == "max" || name == "min" || name == "maximum" || name == "minimum" || name == "neg") {
    for (const auto& ch : e.children()) {
      if (!is_integer_valued(ch)) return false;
    }
    return true;
  }
  return false;
}

Problem::Problem(Sense sense, Expr objective, std::vector<Constraint> constraints, std::vector<Expr> declared)
    : sense_(sense), objective_(std::move(objective)), constraints_(std::move(constraints)) {
  if (!objective_.shape().is_scalar()) {
    throw ShapeError("objective must be scalar, got " + objective_.shape().str());
  }
  for (std::size_t i = 0; i < constraints_.size(); ++i) {
    const auto& c = constraints_[i];
    const Shape &l = c.lhs.shape(), &r = c.rhs.shape();
    if (!(l == r) && !l.is_scalar() && !r.is_scalar()) {
      throw ShapeError("constraint " + std::to_string(i) + ": sides have shapes " + l.str() + " and " + r.str());
    }
  }
  std::vector<Expr> all;
  for (const auto& d : declared) {
    if (!d.is_variable()) throw Error("declared entries must be variables");
    all.push_back(d);
  }
  collect_variables(objective_, all);
  for (const auto& c : constraints_) {
    collect_variables(c.lhs, all);
    collect_variables(c.rhs, all);
  }
  // collect_variables dedups by name; check the nodes behind each name agree.
  std::vector<Expr> seen = all;
  auto check = [&](const Expr& e, auto&& self) -> void {
    if (e.is_variable()) {
      for (const auto& v : seen) {
        if (v.variable().name == e.variable().name && !v.same_node(e)) {
          throw NameCollisionError("two distinct variables are named '" + e.variable().name + "'");
        }
      }
    } else if (e.is_atom()) {
      for (const auto& ch : e.children()) self(ch, self);
    }
  };
  check(objective_, check);
  for (const auto& c : constraints_) {
    check(c.lhs, check);
    check(c.rhs, check);
  }
  for (std::size_t i = 0; i < all.size(); ++i) {
    for (std::size_t j = i + 1; j < all.size(); ++j) {
      if (all[i].variable().name == all[j].variable().name) {
        throw NameCollisionError("variable '" + all[i].variable().name + "' declared twice");
      }
    }
  }
  variables_ = std::move(all);
}

bool is_dcp_constraint(const CurvatureFlags& lhs, Relop op, const CurvatureFlags& rhs) {
  switch (op) {
    case Relop::le: return lhs.is_convex && rhs.is_concave;
    case Relop::ge: return lhs.is_concave && rhs.is_convex;
    case Relop::eq: return lhs.is_affine && rhs.is_affine;
  }
  return false;
}

bool is_dqcp_constraint(const CurvatureFlags& lhs, Relop op, const CurvatureFlags& rhs) {
  if (is_dcp_constraint(lhs, op, rhs)) return true;
  switch (op) {
    case Relop::le: return (lhs.is_quasiconvex && rhs.is_constant) || (lhs.is_constant && rhs.is_quasiconcave);
    case Relop::ge: return (lhs.is_quasiconcave && rhs.is_constant) || (lhs.is_constant && rhs.is_quasiconvex);
    case Relop::eq: return false;
  }
  return false;
}

ProblemReport verify(const Problem& p) {
  Analyzer an;
  ProblemReport r;
  r.objective = an.certify(p.objective());
  const CurvatureFlags& f = r.objective.flags;
  const bool minimize = p.sense() == Sense::minimize;
  r.dqcp = minimize ? f.is_quasiconvex : f.is_quasiconcave;
  r.dcp = minimize ? f.is_convex : f.is_concave;
  if (!r.dqcp) {
    r.issues.push_back("objective is " + f.str() + ", " + (minimize ? "minimize" : "maximize") + " needs " +
                       (minimize ? "quasiconvex" : "quasiconcave"));
  }
  for (std::size_t i = 0; i < p.constraints().size(); ++i) {
    const Constraint& c = p.constraints()[i];
    r.lhs.push_back(an.certify(c.lhs));
    r.rhs.push_back(an.certify(c.rhs));
    const CurvatureFlags &lf = r.lhs.back().flags, &rf = r.rhs.back().flags;
    const bool dcp = is_dcp_constraint(lf, c.op, rf);
    const bool dqcp = is_dqcp_constraint(lf, c.op, rf);
    r.dcp = r.dcp && dcp;
    if (!dqcp) {
      r.dqcp = false;
      r.issues.push_back("constraint " + std::to_string(i) + " (" + to_string(c) + "): " + lf.str() + " " +
                         std::string(to_string(c.op)) + " " + rf.str() + " is not DQCP");
    }
  }
  r.dcp = r.dcp && r.dqcp;
  return r;
}

bool is_dqcp(const Problem& p) { return verify(p).dqcp; }
bool is_dcp(const Problem& p) { return verify(p).dcp; }

}  // namespace dqcp

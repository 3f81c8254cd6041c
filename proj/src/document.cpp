#include "dqcp/document.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dqcp/atom.hpp"
#include "dqcp/error.hpp"

namespace dqcp {

void DocumentOptions::apply(BisectOptions& o) const {
  if (eps) o.eps = *eps;
  if (low) o.low = *low;
  if (high) o.high = *high;
  if (max_probes) o.max_probes = *max_probes;
  if (max_iters) o.solver_options.max_iters = *max_iters;
  if (inconclusive) o.inconclusive = *inconclusive;
  if (solver) o.solver = *solver;
}

namespace {

struct Token {
  enum Kind { ident, number, punct, end } kind = end;
  std::string text;
  double value = 0.0;
  int line = 0;
  int col = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Appends the tokens of one physical line; returns true when the line ends
// with a backslash continuation.
bool tokenize(std::string_view line, int lineno, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (c == '\\') {
      const std::size_t rest = line.find_first_not_of(" \t", i + 1);
      if (rest == std::string_view::npos || line[rest] == '#') return true;
      throw ParseError(lineno, static_cast<int>(i) + 1, "backslash must end the line");
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.line = lineno;
    t.col = static_cast<int>(i) + 1;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      t.kind = Token::ident;
      t.text = std::string(line.substr(i, j - i));
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' ||
               ((c == '-' || c == '+') && i + 1 < line.size() &&
                (std::isdigit(static_cast<unsigned char>(line[i + 1])) || line[i + 1] == '.'))) {
      std::size_t j = i + 1;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '.' ||
                                 ((line[j] == '-' || line[j] == '+') && (line[j - 1] == 'e' || line[j - 1] == 'E')))) {
        ++j;
      }
      t.kind = Token::number;
      t.text = std::string(line.substr(i, j - i));
      const char* first = t.text.data();
      const char* last = first + t.text.size();
      if (*first == '+') ++first;
      const auto res = std::from_chars(first, last, t.value);
      if (res.ec != std::errc() || res.ptr != last || !std::isfinite(t.value)) {
        throw ParseError(lineno, t.col, "malformed number '" + t.text + "'");
      }
      i = j;
    } else if (line.substr(i, 2) == "<=" || line.substr(i, 2) == ">=" || line.substr(i, 2) == "==") {
      t.kind = Token::punct;
      t.text = std::string(line.substr(i, 2));
      i += 2;
    } else if (std::string_view("()=,;").find(c) != std::string_view::npos) {
      t.kind = Token::punct;
      t.text = std::string(1, c);
      ++i;
    } else {
      throw ParseError(lineno, t.col, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  return false;
}

class Cursor {
 public:
  // `toks` ends with an end token.
  Cursor(std::vector<Token> toks, int line) : toks_(std::move(toks)), line_(line) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Token::end; }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (t.kind != Token::end) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw ParseError(t.line, t.col, msg); }

  const Token& ident(const char* what) {
    const Token& t = next();
    if (t.kind != Token::ident) fail(t, std::string("expected ") + what);
    return t;
  }
  double number(const char* what) {
    const Token& t = next();
    if (t.kind != Token::number) fail(t, std::string("expected ") + what);
    return t.value;
  }
  int integer(const char* what) {
    const Token& t = peek();
    const double v = number(what);
    if (v != std::floor(v) || std::abs(v) > 1e9) fail(t, std::string("expected integer ") + what);
    return static_cast<int>(v);
  }
  void punct(const char* p) {
    const Token& t = next();
    if (t.kind != Token::punct || t.text != p) fail(t, std::string("expected '") + p + "'");
  }
  bool accept(const char* p) {
    if (peek().kind == Token::punct && peek().text == p) {
      next();
      return true;
    }
    return false;
  }
  void finish() {
    if (!at_end()) fail(peek(), "unexpected '" + peek().text + "'");
  }
  int line() const { return line_; }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  int line_;
};

// A reference to a named node or an inline scalar literal.
struct Ref {
  bool literal = false;
  std::string name;
  double value = 0.0;
  int line = 0;
  int col = 0;
};

Ref read_ref(Cursor& c, const char* what) {
  const Token& t = c.next();
  Ref r;
  r.line = t.line;
  r.col = t.col;
  if (t.kind == Token::ident) {
    r.name = t.text;
  } else if (t.kind == Token::number) {
    r.literal = true;
    r.value = t.value;
  } else {
    c.fail(t, std::string("expected ") + what);
  }
  return r;
}

Shape read_shape(Cursor& c) {
  const Token& t = c.ident("shape (scalar, vector or matrix)");
  if (t.text == "scalar") return Shape::scalar();
  if (t.text == "vector") {
    const Token& nt = c.peek();
    const int n = c.integer("vector length");
    if (n < 1) c.fail(nt, "vector length must be positive");
    return Shape::vector(n);
  }
  if (t.text == "matrix") {
    const Token& rt = c.peek();
    const int r = c.integer("row count");
    const Token& ct = c.peek();
    const int k = c.integer("column count");
    if (r < 1) c.fail(rt, "row count must be positive");
    if (k < 1) c.fail(ct, "column count must be positive");
    return Shape::matrix(r, k);
  }
  c.fail(t, "unknown shape '" + t.text + "'");
}

struct ExprDef {
  const Atom* atom = nullptr;
  std::vector<Ref> args;
  std::vector<long> params;
  int line = 0;
  int col = 0;
  int state = 0;  // 0 unresolved, 1 in progress, 2 done
  std::optional<Expr> value;
};

class Parser {
 public:
  ProblemDocument run(std::string_view text) {
    int lineno = 0;
    std::size_t start = 0;
    bool header = false;
    std::vector<Token> toks;
    int first = 0;
    while (start <= text.size()) {
      std::size_t stop = text.find('\n', start);
      if (stop == std::string_view::npos) stop = text.size();
      std::string_view line = text.substr(start, stop - start);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      ++lineno;
      start = stop + 1;
      if (toks.empty()) first = lineno;
      const bool more = tokenize(line, lineno, toks);
      if (more && stop != text.size()) continue;
      Token e;
      e.line = lineno;
      e.col = static_cast<int>(line.size()) + 1;
      toks.push_back(e);
      Cursor c(std::move(toks), first);
      toks.clear();
      if (c.at_end()) {
        if (stop == text.size()) break;
        continue;
      }
      if (!header) {
        const Token& t = c.ident("'dqcp' header");
        if (t.text != "dqcp") c.fail(t, "document must start with 'dqcp 1'");
        const Token& vt = c.peek();
        version_ = c.integer("format version");
        if (version_ != 1) c.fail(vt, "unsupported format version " + std::to_string(version_));
        c.finish();
        header = true;
      } else {
        statement(c);
      }
      if (stop == text.size()) break;
    }
    if (!header) throw ParseError(1, 1, "empty document; expected 'dqcp 1'");
    if (!objective_) throw ParseError(lineno, 1, "document has no minimize or maximize line");
    return build();
  }

 private:
  void declare(const Token& t, int line, char kind) {
    if (kinds_.count(t.text)) {
      throw ParseError(line, t.col, "'" + t.text + "' is already defined on line " +
                                        std::to_string(def_line_[t.text]));
    }
    kinds_[t.text] = kind;
    def_line_[t.text] = line;
  }

  void statement(Cursor& c) {
    const Token& kw = c.ident("statement keyword");
    if (kw.text == "var") return var(c);
    if (kw.text == "const") return constant(c);
    if (kw.text == "expr") return expr(c);
    if (kw.text == "minimize" || kw.text == "maximize") {
      if (objective_) c.fail(kw, "second objective; the first is on line " + std::to_string(objective_->line));
      sense_ = kw.text == "minimize" ? Sense::minimize : Sense::maximize;
      objective_ = read_ref(c, "objective reference");
      c.finish();
      return;
    }
    if (kw.text == "constraint") return constraint(c);
    if (kw.text == "option") return option(c);
    c.fail(kw, "unknown statement '" + kw.text + "'");
  }

  void var(Cursor& c) {
    const Token name = c.ident("variable name");
    declare(name, name.line, 'v');
    VariableInfo info;
    info.name = name.text;
    info.shape = read_shape(c);
    bool signed_ = false;
    while (!c.at_end()) {
      const Token& a = c.ident("variable attribute");
      Sign s;
      if (a.text == "symmetric") {
        info.symmetric = true;
      } else if (a.text == "psd") {
        info.psd = true;
      } else if (parse_sign(a.text, s)) {
        if (signed_) c.fail(a, "more than one sign attribute");
        info.sign = s;
        signed_ = true;
      } else {
        c.fail(a, "unknown variable attribute '" + a.text + "'");
      }
    }
    try {
      const Expr v = make_variable(info);
      vars_.emplace(info.name, v);
      declared_.push_back(v);
    } catch (const Error& e) {
      c.fail(name, e.what());
    }
  }

  void constant(Cursor& c) {
    const Token name = c.ident("constant name");
    declare(name, name.line, 'c');
    Shape shape = Shape::scalar();
    if (!(c.peek().kind == Token::punct && c.peek().text == "=")) shape = read_shape(c);
    c.punct("=");
    std::vector<double> vals;
    while (!c.at_end()) vals.push_back(c.number("number"));
    if (static_cast<int>(vals.size()) != shape.size()) {
      c.fail(c.peek(), "constant '" + name.text + "' of shape " + shape.str() + " needs " +
                           std::to_string(shape.size()) + " values, got " + std::to_string(vals.size()));
    }
    Value v = make_value(shape);
    for (int k = 0; k < shape.size(); ++k) flat(v, k) = vals[static_cast<std::size_t>(k)];
    consts_.emplace(name.text, make_constant(v, shape.kind));
  }

  void expr(Cursor& c) {
    const Token name = c.ident("expression name");
    declare(name, name.line, 'e');
    c.punct("=");
    const Token& at = c.ident("atom name");
    ExprDef d;
    d.line = at.line;
    d.col = at.col;
    d.atom = find_atom(at.text);
    if (!d.atom) c.fail(at, "unknown atom '" + at.text + "'");
    c.punct("(");
    d.args.push_back(read_ref(c, "argument"));
    while (c.accept(",")) d.args.push_back(read_ref(c, "argument"));
    if (c.accept(";")) {
      d.params.push_back(c.integer("parameter"));
      while (c.accept(",")) d.params.push_back(c.integer("parameter"));
    }
    c.punct(")");
    c.finish();
    exprs_.emplace(name.text, std::move(d));
  }

  void constraint(Cursor& c) {
    Pending p;
    p.lhs = read_ref(c, "left-hand side");
    const Token& op = c.next();
    if (op.kind == Token::punct && op.text == "<=") {
      p.op = Relop::le;
    } else if (op.kind == Token::punct && op.text == ">=") {
      p.op = Relop::ge;
    } else if (op.kind == Token::punct && op.text == "==") {
      p.op = Relop::eq;
    } else {
      c.fail(op, "expected '<=', '>=' or '=='");
    }
    p.op_line = op.line;
    p.op_col = op.col;
    p.rhs = read_ref(c, "right-hand side");
    c.finish();
    constraints_.push_back(p);
  }

  void option(Cursor& c) {
    const Token key = c.ident("option name");
    if (key.text == "eps" || key.text == "low" || key.text == "high") {
      const Token& vt = c.peek();
      const double v = c.number("numeric value");
      if (key.text == "eps") {
        if (!(v > 0)) c.fail(vt, "eps must be positive");
        options_.eps = v;
      } else {
        (key.text == "low" ? options_.low : options_.high) = v;
      }
    } else if (key.text == "max_probes" || key.text == "max_iters") {
      const Token& vt = c.peek();
      const int v = c.integer("count");
      if (v <= 0) c.fail(vt, key.text + " must be positive");
      (key.text == "max_probes" ? options_.max_probes : options_.max_iters) = v;
    } else if (key.text == "inconclusive") {
      const Token& v = c.ident("abort or infeasible");
      if (v.text == "abort") {
        options_.inconclusive = InconclusivePolicy::abort;
      } else if (v.text == "infeasible" || v.text == "treat_as_infeasible") {
        options_.inconclusive = InconclusivePolicy::treat_as_infeasible;
      } else {
        c.fail(v, "expected abort or infeasible");
      }
    } else if (key.text == "solver") {
      const Token& v = c.ident("solver name");
      if (v.text != "barrier" && v.text != "projection") c.fail(v, "unknown solver '" + v.text + "'");
      options_.solver = v.text;
    } else {
      c.fail(key, "unknown option '" + key.text + "'");
    }
    c.finish();
    if (options_.low && options_.high && !(*options_.low < *options_.high)) {
      throw ParseError(c.line(), key.col, "option low must be below high");
    }
  }

  Expr resolve(const Ref& r) {
    if (r.literal) return make_constant(r.value);
    if (auto it = vars_.find(r.name); it != vars_.end()) return it->second;
    if (auto it = consts_.find(r.name); it != consts_.end()) return it->second;
    auto it = exprs_.find(r.name);
    if (it == exprs_.end()) throw ParseError(r.line, r.col, "undefined name '" + r.name + "'");
    ExprDef& d = it->second;
    if (d.state == 2) return *d.value;
    if (d.state == 1) throw ParseError(r.line, r.col, "cyclic reference through '" + r.name + "'");
    d.state = 1;
    std::vector<Expr> args;
    for (const auto& a : d.args) args.push_back(resolve(a));
    try {
      d.value = apply_atom(*d.atom, std::move(args), d.params);
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(d.line, d.col, e.what());
    }
    d.state = 2;
    return *d.value;
  }

  ProblemDocument build() {
    // Every expression is resolved so that errors in unused ones surface too.
    for (auto& [name, d] : exprs_) {
      Ref r;
      r.name = name;
      r.line = d.line;
      r.col = 1;
      resolve(r);
    }
    const Expr obj = resolve(*objective_);
    if (!obj.shape().is_scalar()) {
      throw ParseError(objective_->line, objective_->col,
                       "objective must be scalar, got " + obj.shape().str());
    }
    std::vector<Constraint> cons;
    for (const auto& p : constraints_) {
      Constraint k{resolve(p.lhs), p.op, resolve(p.rhs)};
      const Shape& a = k.lhs.shape();
      const Shape& b = k.rhs.shape();
      if (!(a == b || a.is_scalar() || b.is_scalar())) {
        throw ParseError(p.op_line, p.op_col, "constraint sides have shapes " + a.str() + " and " + b.str());
      }
      cons.push_back(std::move(k));
    }
    try {
      return ProblemDocument{version_, Problem(sense_, obj, std::move(cons), declared_), options_};
    } catch (const Error& e) {
      throw ParseError(objective_->line, 1, e.what());
    }
  }

  struct Pending {
    Ref lhs;
    Relop op = Relop::le;
    int op_line = 0;
    int op_col = 0;
    Ref rhs;
  };

  int version_ = 1;
  std::map<std::string, char> kinds_;
  std::map<std::string, int> def_line_;
  std::map<std::string, Expr> vars_;
  std::map<std::string, Expr> consts_;
  std::map<std::string, ExprDef> exprs_;
  std::vector<Expr> declared_;
  std::vector<Pending> constraints_;
  std::optional<Ref> objective_;
  Sense sense_ = Sense::minimize;
  DocumentOptions options_;
};

std::string exact(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string shape_words(const Shape& s) {
  switch (s.kind) {
    case Shape::Kind::scalar: return "scalar";
    case Shape::Kind::vector: return "vector " + std::to_string(s.rows);
    case Shape::Kind::matrix: return "matrix " + std::to_string(s.rows) + " " + std::to_string(s.cols);
  }
  return "scalar";
}

class Printer {
 public:
  explicit Printer(const Problem& p) {
    for (const auto& v : p.variables()) taken_.insert(v.variable().name);
  }

  std::string ref(const Expr& e) {
    switch (e.kind()) {
      case Expr::Kind::variable: return e.variable().name;
      case Expr::Kind::constant:
        if (e.shape().is_scalar()) return exact(e.value()(0, 0));
        break;
      case Expr::Kind::atom: break;
    }
    if (auto it = names_.find(e.node_id()); it != names_.end()) return it->second;
    std::string name;
    if (e.is_constant_leaf()) {
      name = fresh("c");
      std::string line = "const " + name + " " + shape_words(e.shape()) + " =";
      for (int k = 0; k < e.shape().size(); ++k) line += " " + exact(flat(e.value(), k));
      body_ << line << "\n";
    } else {
      std::vector<std::string> args;
      for (const auto& ch : e.children()) args.push_back(ref(ch));
      name = fresh("e");
      body_ << "expr " << name << " = " << e.atom().name() << "(";
      for (std::size_t i = 0; i < args.size(); ++i) body_ << (i ? ", " : "") << args[i];
      if (!e.params().empty()) {
        body_ << "; ";
        for (std::size_t i = 0; i < e.params().size(); ++i) body_ << (i ? ", " : "") << e.params()[i];
      }
      body_ << ")\n";
    }
    names_[e.node_id()] = name;
    return name;
  }

  std::string body() const { return body_.str(); }

 private:
  std::string fresh(const char* prefix) {
    for (;;) {
      std::string n = prefix + std::to_string(++counter_);
      if (taken_.insert(n).second) return n;
    }
  }

  std::set<std::string> taken_;
  std::map<const void*, std::string> names_;
  std::ostringstream body_;
  int counter_ = 0;
};

}  // namespace

ProblemDocument parse_document(std::string_view text) { return Parser().run(text); }

ProblemDocument read_document(const std::string& path) {
  std::ostringstream buf;
  if (path == "-") {
    buf << std::cin.rdbuf();
  } else {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open '" + path + "'");
    buf << in.rdbuf();
  }
  return parse_document(buf.str());
}

std::string print_document(const Problem& p, const DocumentOptions& options) {
  std::ostringstream out;
  out << "dqcp 1\n";
  for (const auto& v : p.variables()) {
    const VariableInfo& info = v.variable();
    out << "var " << info.name << " " << shape_words(info.shape);
    if (info.sign != Sign::unknown) out << " " << to_string(info.sign);
    if (info.psd) {
      out << " psd";
    } else if (info.symmetric) {
      out << " symmetric";
    }
    out << "\n";
  }
  Printer pr(p);
  const std::string obj = pr.ref(p.objective());
  std::vector<std::string> cons;
  for (const auto& c : p.constraints()) {
    const std::string l = pr.ref(c.lhs);
    const std::string r = pr.ref(c.rhs);
    const char* op = c.op == Relop::le ? "<=" : c.op == Relop::ge ? ">=" : "==";
    cons.push_back("constraint " + l + " " + op + " " + r);
  }
  out << pr.body();
  out << to_string(p.sense()) << " " << obj << "\n";
  for (const auto& c : cons) out << c << "\n";
  if (options.eps) out << "option eps " << exact(*options.eps) << "\n";
  if (options.low) out << "option low " << exact(*options.low) << "\n";
  if (options.high) out << "option high " << exact(*options.high) << "\n";
  if (options.max_probes) out << "option max_probes " << *options.max_probes << "\n";
  if (options.max_iters) out << "option max_iters " << *options.max_iters << "\n";
  if (options.inconclusive) {
    out << "option inconclusive "
        << (*options.inconclusive == InconclusivePolicy::abort ? "abort" : "infeasible") << "\n";
  }
  if (options.solver) out << "option solver " << *options.solver << "\n";
  return out.str();
}

bool structurally_equal(const Expr& a, const Expr& b) {
  if (a.kind() != b.kind() || !(a.shape() == b.shape()) || a.sign() != b.sign()) return false;
  switch (a.kind()) {
    case Expr::Kind::variable: {
      const auto& x = a.variable();
      const auto& y = b.variable();
      return x.name == y.name && x.shape == y.shape && x.sign == y.sign && x.symmetric == y.symmetric &&
             x.psd == y.psd;
    }
    case Expr::Kind::constant: {
      const Value& x = a.value();
      const Value& y = b.value();
      return x.rows() == y.rows() && x.cols() == y.cols() && (x.array() == y.array()).all();
    }
    case Expr::Kind::atom: {
      if (&a.atom() != &b.atom()) return false;
      if (!std::equal(a.params().begin(), a.params().end(), b.params().begin(), b.params().end())) return false;
      if (a.children().size() != b.children().size()) return false;
      for (std::size_t i = 0; i < a.children().size(); ++i) {
        if (!structurally_equal(a.children()[i], b.children()[i])) return false;
      }
      return true;
    }
  }
  return false;
}

bool structurally_equal(const Problem& a, const Problem& b) {
  if (a.sense() != b.sense() || !structurally_equal(a.objective(), b.objective())) return false;
  if (a.constraints().size() != b.constraints().size()) return false;
  for (std::size_t i = 0; i < a.constraints().size(); ++i) {
    const auto& x = a.constraints()[i];
    const auto& y = b.constraints()[i];
    if (x.op != y.op || !structurally_equal(x.lhs, y.lhs) || !structurally_equal(x.rhs, y.rhs)) return false;
  }
  if (a.variables().size() != b.variables().size()) return false;
  for (std::size_t i = 0; i < a.variables().size(); ++i) {
    if (!structurally_equal(a.variables()[i], b.variables()[i])) return false;
  }
  return true;
}

}  // namespace dqcp

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

#include "doctest.h"
#include "dqcp/document.hpp"
#include "dqcp/error.hpp"
#include "support.hpp"

using namespace dqcp;
using namespace dqcp::ops;
using namespace dqcp::testing;
namespace fs = std::filesystem;

namespace {

const std::string kProblems = DQCP_PROBLEMS_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

struct Located {
  int line = 0;
  int column = 0;
  std::string message;
};

Located parse_failure(const std::string& text) {
  try {
    parse_document(text);
  } catch (const ParseError& e) {
    return {e.line(), e.column(), e.what()};
  }
  FAIL("document parsed: " << text);
  return {};
}

class Scratch {
 public:
  Scratch() {
    dir_ = fs::temp_directory_path() / ("dqcp-doc-" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }
  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
  }
  fs::path path(const std::string& name) const { return dir_ / name; }

 private:
  fs::path dir_;
};

struct Run {
  int code = -1;
  std::string out;
};

Run cli(const std::string& args, const fs::path& out_file) {
  const std::string cmd =
      std::string("\"") + DQCP_CLI_PATH + "\" " + args + " > \"" + out_file.string() + "\" 2>&1";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out_file);
  return r;
}

std::string problem_file(const char* name) { return "\"" + kProblems + "/" + name + "\""; }

const char* kHello = R"(dqcp 1
var x scalar
var y scalar pos
expr s = sqrt(x)
expr ns = neg(s)
expr f = ratio(ns, y)
expr ex = exp(x)
minimize f
constraint ex <= y
)";

}  // namespace

TEST_CASE("bundled documents parse into the reference problems") {
  const ProblemDocument hello = read_document(kProblems + "/hello_world.dqcp");
  CHECK(hello.problem.variables().size() == 2);
  CHECK(hello.problem.constraints().size() == 1);
  CHECK(hello.problem.sense() == Sense::minimize);
  CHECK(structurally_equal(hello.problem, hello_world()));

  const ProblemDocument ge = read_document(kProblems + "/gen_eig.dqcp");
  REQUIRE(ge.problem.variables().size() == 2);
  for (const auto& v : ge.problem.variables()) CHECK(v.shape() == Shape::matrix(3, 3));
  CHECK(ge.problem.constraints().size() == 6);
  CHECK(structurally_equal(ge.problem, gen_eig().problem));

  const ProblemDocument ml = read_document(kProblems + "/min_length.dqcp");
  CHECK(structurally_equal(ml.problem, min_length().problem));
  CHECK(verify(ml.problem).dqcp);
}

TEST_CASE("unknown atoms are rejected with their location") {
  const Located e = parse_failure("dqcp 1\nvar x scalar\nexpr f = frobnicate(x)\nminimize f\n");
  CHECK(e.line == 3);
  CHECK(e.column == 10);
  CHECK(e.message.find("unknown atom 'frobnicate'") != std::string::npos);
}

TEST_CASE("parse errors carry line and column") {
  SUBCASE("dangling reference") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nexpr f = exp(z)\nminimize f\n");
    CHECK(e.line == 3);
    CHECK(e.column == 14);
    CHECK(e.message.find("undefined name 'z'") != std::string::npos);
  }
  SUBCASE("dangling objective") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nminimize g\n");
    CHECK(e.line == 3);
    CHECK(e.column == 10);
  }
  SUBCASE("shape error inside an atom") {
    const Located e = parse_failure("dqcp 1\nvar x vector 3\nvar y vector 2\nexpr s = add(x, y)\nminimize s\n");
    CHECK(e.line == 4);
    CHECK(e.column == 10);
  }
  SUBCASE("constraint sides of different shapes") {
    const Located e = parse_failure(
        "dqcp 1\nvar x vector 3\nvar y vector 2\nexpr s = sum(x)\nminimize s\nconstraint x <= y\n");
    CHECK(e.line == 6);
    CHECK(e.column == 14);
  }
  SUBCASE("non-scalar objective") {
    const Located e = parse_failure("dqcp 1\nvar x vector 3\nminimize x\n");
    CHECK(e.line == 3);
    CHECK(e.column == 10);
  }
  SUBCASE("duplicate definition") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nexpr x = exp(x)\nminimize x\n");
    CHECK(e.line == 3);
    CHECK(e.column == 6);
    CHECK(e.message.find("already defined on line 2") != std::string::npos);
  }
  SUBCASE("cyclic references") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nexpr a = exp(b)\nexpr b = log(a)\nminimize a\n");
    CHECK(e.message.find("cyclic") != std::string::npos);
    CHECK((e.line == 3 || e.line == 4));
  }
  SUBCASE("two objectives") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nminimize x\nmaximize x\n");
    CHECK(e.line == 4);
    CHECK(e.column == 1);
  }
  SUBCASE("missing objective") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\n");
    CHECK(e.message.find("no minimize or maximize") != std::string::npos);
  }
  SUBCASE("missing header") {
    const Located e = parse_failure("var x scalar\nminimize x\n");
    CHECK(e.line == 1);
    CHECK(e.column == 1);
  }
  SUBCASE("bad character") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nminimize x @\n");
    CHECK(e.line == 3);
    CHECK(e.column == 12);
  }
  SUBCASE("constant with too few values") {
    const Located e = parse_failure("dqcp 1\nconst c vector 3 = 1 2\nvar x scalar\nminimize x\n");
    CHECK(e.line == 2);
    CHECK(e.message.find("needs 3 values, got 2") != std::string::npos);
  }
  SUBCASE("bad atom parameter") {
    const Located e = parse_failure("dqcp 1\nvar X matrix 2 2\nexpr a = index(X; 5, 0)\nminimize a\n");
    CHECK(e.line == 3);
    CHECK(e.column == 10);
  }
  SUBCASE("continuation lines keep physical positions") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nexpr f = add(x, \\\n   q)\nminimize f\n");
    CHECK(e.line == 4);
    CHECK(e.column == 4);
  }
  SUBCASE("option out of range") {
    const Located e = parse_failure("dqcp 1\nvar x scalar\nminimize x\noption eps -1\n");
    CHECK(e.line == 4);
    CHECK(e.column == 12);
  }
}

TEST_CASE("unused expressions are still checked") {
  const Located e = parse_failure("dqcp 1\nvar x scalar\nexpr bad = log(nowhere)\nminimize x\n");
  CHECK(e.line == 3);
  CHECK(e.column == 16);
}

TEST_CASE("comments, blank lines and CRLF are accepted") {
  std::string text = "# leading comment\n\n";
  for (const char* p = kHello; *p; ++p) {
    if (*p == '\n') text += "  # trailing\r";
    text += *p;
  }
  const ProblemDocument d = parse_document(text);
  CHECK(structurally_equal(d.problem, hello_world()));
}

TEST_CASE("document options are parsed and applied") {
  const ProblemDocument d = parse_document(std::string(kHello) +
                                           "option eps 1e-4\noption low -2\noption high 0.5\n"
                                           "option max_probes 40\noption max_iters 900\n"
                                           "option inconclusive infeasible\noption solver projection\n");
  BisectOptions o;
  d.options.apply(o);
  CHECK(o.eps == 1e-4);
  CHECK(o.low == -2.0);
  CHECK(o.high == 0.5);
  CHECK(o.max_probes == 40);
  CHECK(o.solver_options.max_iters == 900);
  CHECK(o.inconclusive == InconclusivePolicy::treat_as_infeasible);
  CHECK(o.solver == "projection");

  const Located e = parse_failure(std::string(kHello) + "option high -1\noption low 3\n");
  CHECK(e.line == 11);
}

TEST_CASE("print then parse is the identity on problems and options") {
  std::vector<Problem> problems{hello_world(), hello_world(false), gen_eig().problem, min_length().problem};
  for (auto& p : dcp_corpus(60, 41)) problems.push_back(std::move(p));
  for (const auto& c : curvature_table()) {
    if (c.expr.shape().is_scalar()) problems.emplace_back(Sense::minimize, c.expr);
  }
  DocumentOptions opts;
  opts.eps = 1.0 / 3.0;
  opts.low = -0.1;
  opts.max_iters = 77;
  opts.inconclusive = InconclusivePolicy::abort;
  opts.solver = "barrier";
  int n = 0;
  for (const auto& p : problems) {
    const std::string text = print_document(p, n % 2 ? opts : DocumentOptions{});
    INFO(text);
    const ProblemDocument back = parse_document(text);
    CHECK(structurally_equal(back.problem, p));
    CHECK(back.options == (n % 2 ? opts : DocumentOptions{}));
    CHECK(print_document(back.problem, back.options) == text);
    ++n;
  }
  CHECK(n > 80);
}

TEST_CASE("structural equality notices differences") {
  const Expr x = make_variable("x");
  const Expr xp = make_variable("x", Shape::scalar(), Sign::positive);
  CHECK_FALSE(structurally_equal(call("exp", x), call("exp", xp)));
  CHECK_FALSE(structurally_equal(call("exp", x), call("log", x)));
  CHECK_FALSE(structurally_equal(x + make_constant(1.0), x + make_constant(std::nextafter(1.0, 2.0))));
  CHECK(structurally_equal(x + make_constant(1.0), make_variable("x") + make_constant(1.0)));
  CHECK_FALSE(structurally_equal(Problem(Sense::minimize, call("exp", x)), Problem(Sense::maximize, call("exp", x))));
}

TEST_CASE("cli exit codes") {
  Scratch dir;
  const fs::path out = dir.path("out.txt");

  SUBCASE("verify a DQCP but not DCP document") {
    const Run r = cli("verify " + problem_file("hello_world.dqcp"), out);
    CHECK(r.code == 0);
    CHECK(r.out.find("DQCP: yes; DCP: no") != std::string::npos);
    CHECK(r.out.find("ratio  quasiconvex  [quasi-composition]") != std::string::npos);
  }
  SUBCASE("verify without the positive attribute") {
    std::string text = kHello;
    text.replace(text.find(" pos\n"), 4, "");
    const Run r = cli("verify \"" + dir.write("nopos.dqcp", text).string() + "\"", out);
    CHECK(r.code == 2);
    CHECK(r.out.find("DQCP: no") != std::string::npos);
    CHECK(r.out.find("ratio: denominator must be positive or negative") != std::string::npos);
  }
  SUBCASE("verify a DCP document") {
    const fs::path f = dir.write("ls.dqcp",
                                 "dqcp 1\nvar x vector 3\nconst b vector 3 = 1 2 3\nexpr nb = neg(b)\n"
                                 "expr r = add(x, nb)\nexpr f = sum_squares(r)\nminimize f\n");
    const Run r = cli("verify \"" + f.string() + "\"", out);
    CHECK(r.code == 0);
    CHECK(r.out.find("DQCP: yes; DCP: yes") != std::string::npos);
  }
  SUBCASE("solve hello world") {
    const Run r = cli("solve " + problem_file("hello_world.dqcp"), out);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "optimal");
    CHECK(j["value"].get<double>() == doctest::Approx(-0.4288821220397949).epsilon(1e-3));
    CHECK(j["variables"]["x"].get<double>() == doctest::Approx(0.5).epsilon(2e-2));
    CHECK(j["variables"]["y"].get<double>() == doctest::Approx(1.6487).epsilon(1e-2));
    CHECK(j["interval"].size() == 2);
    CHECK(j["trace"].size() > 0);
    CHECK(j["tolerances"].contains("eps"));
  }
  SUBCASE("solve gen-eig with output file") {
    const fs::path res = dir.path("res.json");
    const Run r = cli("solve " + problem_file("gen_eig.dqcp") + " --output \"" + res.string() + "\"", out);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(slurp(res));
    CHECK(j["value"].get<double>() == doctest::Approx(4.0).epsilon(1e-2 / 4.0));
    CHECK(j["variables"]["X"].size() == 3);
  }
  SUBCASE("solve from stdin") {
    const Run r = cli("solve - < " + problem_file("min_length.dqcp"), out);
    REQUIRE(r.code == 0);
    CHECK(nlohmann::json::parse(r.out)["value"].get<double>() == 8.0);
  }
  SUBCASE("infeasible document exits 1") {
    const fs::path f = dir.write("inf.dqcp",
                                 "dqcp 1\nvar x scalar\nvar y scalar\nexpr e = exp(x)\nminimize x\n"
                                 "constraint e <= y\nconstraint y == -1\n");
    const Run r = cli("solve \"" + f.string() + "\"", out);
    CHECK(r.code == 1);
    CHECK(nlohmann::json::parse(r.out)["status"] == "infeasible_problem");
  }
  SUBCASE("unbounded document exits 1 after the full probe budget") {
    const fs::path f = dir.write("unb.dqcp", "dqcp 1\nvar x scalar\nminimize x\n");
    const Run r = cli("solve \"" + f.string() + "\"", out);
    CHECK(r.code == 1);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["status"] == "unbounded_below_suspected");
    for (const auto& t : j["trace"]) CHECK(t["outcome"] == "feasible");
  }
  SUBCASE("solve refuses non-DQCP documents") {
    std::string text = kHello;
    text.replace(text.find(" pos\n"), 4, "");
    const Run r = cli("solve \"" + dir.write("nopos.dqcp", text).string() + "\"", out);
    CHECK(r.code == 2);
    CHECK(r.out.find("not DQCP") != std::string::npos);
  }
  SUBCASE("parse failure exits 3 with a location") {
    const fs::path f = dir.write("bad.dqcp", "dqcp 1\nvar x scalar\nexpr f = frobnicate(x)\nminimize f\n");
    const Run r = cli("verify \"" + f.string() + "\"", out);
    CHECK(r.code == 3);
    CHECK(r.out.find("bad.dqcp:3:10: unknown atom 'frobnicate'") != std::string::npos);
  }
  SUBCASE("missing file and bad flags exit 3") {
    CHECK(cli("verify \"" + dir.path("nope.dqcp").string() + "\"", out).code == 3);
    CHECK(cli("solve " + problem_file("hello_world.dqcp") + " --eps -1", out).code == 3);
    CHECK(cli("solve " + problem_file("hello_world.dqcp") + " --inconclusive maybe", out).code == 3);
    CHECK(cli("launch", out).code == 3);
  }
  SUBCASE("canon dumps the cone blocks of one level") {
    const Run r = cli("canon " + problem_file("hello_world.dqcp") + " --t -0.4", out);
    CHECK(r.code == 0);
    CHECK(r.out.find("block exp(1)") != std::string::npos);
    CHECK(r.out.find("block rsoc(3)") != std::string::npos);
  }
  SUBCASE("canon at an unattainable level") {
    const Run r =
        cli("canon " + problem_file("min_length.dqcp") + " --t 0.5 --solver barrier", out);
    CHECK(r.code == 0);
    CHECK((r.out.find("infeasible") != std::string::npos));
  }
}

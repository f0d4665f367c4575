#include <doctest.h>

#include <random>

#include "plt/syntax.hpp"

using namespace plt;

namespace {

Signature demo_sig() {
  return parse_signature(
      "fun f/1\n"
      "fun c/0\n"
      "fun g/2\n"
      "rel p/2\n"
      "rel q/1\n"
      "params a b\n");
}

// Deterministic random formula builder used by the round-trip properties.
struct Gen {
  std::mt19937 rng;
  Signature sig;
  explicit Gen(unsigned seed) : rng(seed), sig(demo_sig()) {}

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }

  Term term(const std::vector<std::string>& scope, int depth) {
    int choice = pick(depth > 0 ? 5 : 3);
    if (choice == 0 && !scope.empty()) return Term::var(scope[pick((int)scope.size())]);
    if (choice <= 1) return Term::param(pick(2) ? "a" : "b");
    if (choice == 2) return Term::apply("c", {});
    if (choice == 3) return Term::apply("f", {term(scope, depth - 1)});
    return Term::apply("g", {term(scope, depth - 1), term(scope, depth - 1)});
  }

  Formula formula(std::vector<std::string> scope, int depth) {
    int choice = pick(depth > 0 ? 9 : 3);
    switch (choice) {
      case 0:
        return Formula::atom("p", {term(scope, 1), term(scope, 1)});
      case 1:
        return Formula::atom("q", {term(scope, 2)});
      case 2:
        return Formula::equal(term(scope, 1), term(scope, 1));
      case 3:
        return Formula::falsum();
      case 4:
        return Formula::negation(formula(scope, depth - 1));
      case 5:
        return Formula::conj(formula(scope, depth - 1), formula(scope, depth - 1));
      case 6:
        return Formula::disj(formula(scope, depth - 1), formula(scope, depth - 1));
      case 7:
        return Formula::implies(formula(scope, depth - 1), formula(scope, depth - 1));
      default: {
        std::string v = "x" + std::to_string(pick(3));
        scope.push_back(v);
        Formula body = formula(scope, depth - 1);
        return pick(2) ? Formula::forall(v, std::move(body))
                       : Formula::exists(v, std::move(body));
      }
    }
  }
};

}  // namespace

TEST_CASE("parse builds the expected tree and print round-trips it") {
  Signature sig = demo_sig();
  Formula f = parse_formula("forall x. exists y. p(x,y)", sig);
  REQUIRE(f.kind() == FormulaKind::Forall);
  CHECK(f.name() == "x");
  REQUIRE(f.body().kind() == FormulaKind::Exists);
  CHECK(f.body().name() == "y");
  REQUIRE(f.body().body().kind() == FormulaKind::Atom);
  CHECK(f.body().body().name() == "p");
  CHECK(f.body().body().terms()[0] == Term::var("x"));
  CHECK(f.body().body().terms()[1] == Term::var("y"));
  CHECK(print_formula(f) == "forall x. exists y. p(x, y)");
}

TEST_CASE("precedence: ~ over & over | over ->, with -> right-associative") {
  Signature sig = demo_sig();
  Formula f = parse_formula("~q(@a) & q(@b) | q(c) -> false", sig);
  REQUIRE(f.kind() == FormulaKind::Implies);
  CHECK(f.right().kind() == FormulaKind::Falsum);
  REQUIRE(f.left().kind() == FormulaKind::Or);
  CHECK(f.left().right() == Formula::atom("q", {Term::apply("c", {})}));
  REQUIRE(f.left().left().kind() == FormulaKind::And);
  CHECK(f.left().left().left() == Formula::negation(Formula::atom("q", {Term::param("a")})));

  Formula g = parse_formula("false -> false -> false", sig);
  CHECK(g.right().kind() == FormulaKind::Implies);
  CHECK(g.left().kind() == FormulaKind::Falsum);
}

TEST_CASE("quantifier scope extends maximally to the right") {
  Signature sig = demo_sig();
  Formula f = parse_formula("forall x. q(x) -> q(@a)", sig);
  REQUIRE(f.kind() == FormulaKind::Forall);
  CHECK(f.body().kind() == FormulaKind::Implies);

  Formula g = parse_formula("q(@a) & forall x. q(x) | q(@b)", sig);
  REQUIRE(g.kind() == FormulaKind::And);
  REQUIRE(g.right().kind() == FormulaKind::Forall);
  CHECK(g.right().body().kind() == FormulaKind::Or);
}

TEST_CASE("definedness sugar t! expands to an equality witness") {
  Signature sig = demo_sig();
  Formula f = parse_formula("f(@a)!", sig);
  Formula expect =
      Formula::exists("y", Formula::equal(Term::var("y"), Term::apply("f", {Term::param("a")})));
  CHECK(f == expect);

  // The chosen witness variable avoids the term's own variables.
  Formula d = definedness(Term::var("y"));
  CHECK(d == Formula::exists("y'", Formula::equal(Term::var("y'"), Term::var("y"))));
}

TEST_CASE("bare identifier resolution: bound variable, else 0-ary function, else error") {
  Signature sig = demo_sig();
  CHECK(parse_term("c", sig) == Term::apply("c", {}));
  CHECK_THROWS_AS(parse_term("x", sig), error);
  Formula f = parse_formula("forall c. q(c)", sig);  // c bound here shadows the constant
  CHECK(f.body().terms()[0] == Term::var("c"));
  CHECK_THROWS_AS(parse_formula("p(@a)", sig), error);      // arity mismatch
  CHECK_THROWS_AS(parse_formula("r(@a)", sig), error);      // undeclared
  CHECK_THROWS_AS(parse_formula("undef = @a", sig), error); // undef not enabled
  Signature su = sig.with_undef();
  CHECK(parse_formula("undef = @a", su) ==
        Formula::equal(Term::apply("undef", {}), Term::param("a")));
}

TEST_CASE("numeric towers are concrete sugar") {
  Signature sig = demo_sig();
  CHECK(parse_term("f^3(@a)", sig) ==
        Term::apply("f", {Term::apply("f", {Term::apply("f", {Term::param("a")})})}));
  CHECK(parse_term("f^0(@a)", sig) == Term::param("a"));
}

TEST_CASE("signature validation rejects reserved and duplicate names") {
  CHECK_THROWS_AS(parse_signature("rel false/1\nparams a\n"), error);
  CHECK_THROWS_AS(parse_signature("fun f/1\nfun f/1\nparams a\n"), error);
  CHECK_THROWS_AS(parse_signature("rel p/0\nparams a\n"), error);
  CHECK_THROWS_AS(parse_signature("fun f/1\n"), error);  // empty P0
  Signature sig = parse_signature("fun undef/0\nrel q/1\nparams a\n");
  CHECK(sig.hasUndef);
  CHECK(sig.function_arity("undef") == 0);
}

TEST_CASE("substitution renames a binder only when capture would occur") {
  Formula f = Formula::exists("y", Formula::atom("p", {Term::var("x"), Term::var("y")}));
  Formula got = substitute(f, {{"x", Term::var("y")}});
  Formula expect = Formula::exists("y'", Formula::atom("p", {Term::var("y"), Term::var("y'")}));
  CHECK(got == expect);

  // No capture: binder name is preserved verbatim.
  Formula g = Formula::exists("y", Formula::atom("p", {Term::var("x"), Term::var("y")}));
  Formula got2 = substitute(g, {{"x", Term::param("a")}});
  CHECK(got2 == Formula::exists("y", Formula::atom("p", {Term::param("a"), Term::var("y")})));

  // Simultaneous substitution is not sequential.
  Formula h = Formula::atom("p", {Term::var("x"), Term::var("y")});
  Formula got3 = substitute(h, {{"x", Term::var("y")}, {"y", Term::var("x")}});
  CHECK(got3 == Formula::atom("p", {Term::var("y"), Term::var("x")}));
}

TEST_CASE("substitution leaves no trace of the substituted variable") {
  Gen gen(20240811);
  for (int i = 0; i < 200; ++i) {
    Formula f = gen.formula({"x0"}, 3);
    Formula got = substitute(f, {{"x0", Term::param("a")}});
    CHECK(!has_free_var(got, "x0"));
    for (const std::string& v : free_vars(f))
      if (v != "x0") CHECK(has_free_var(got, v));
  }
}

TEST_CASE("print then parse is the identity on random formulae") {
  Signature sig = demo_sig();
  Gen gen(987654321);
  for (int i = 0; i < 300; ++i) {
    Formula f = gen.formula({}, 4);
    std::string s = print_formula(f);
    CAPTURE(s);
    Formula back = parse_formula(s, sig);
    CHECK(back == f);
  }
}

TEST_CASE("purify maps free variables to fresh parameters in first-occurrence order") {
  Signature sig = demo_sig();
  Formula prem = Formula::atom("p", {Term::var("x"), Term::var("y")});
  Formula goal = Formula::atom("q", {Term::var("y")});
  PurifyResult r = purify({prem}, goal, &sig);
  REQUIRE(r.theta.size() == 2);
  CHECK(r.theta[0] == std::pair<std::string, std::string>("x", "v0"));
  CHECK(r.theta[1] == std::pair<std::string, std::string>("y", "v1"));
  CHECK(r.premises[0] == Formula::atom("p", {Term::param("v0"), Term::param("v1")}));
  CHECK(r.goal == Formula::atom("q", {Term::param("v1")}));
  CHECK(is_pure(r.premises[0]));
  CHECK(is_pure(r.goal));

  // Fresh names dodge parameters already present in the input.
  Formula goal2 = Formula::conj(Formula::atom("q", {Term::var("x")}),
                                Formula::atom("q", {Term::param("v0")}));
  PurifyResult r2 = purify({}, goal2, &sig);
  REQUIRE(r2.theta.size() == 1);
  CHECK(r2.theta[0].second == "v1");
}

TEST_CASE("enumerate_pure_terms: documented example and prefix property") {
  Signature tower = parse_signature("fun f/1\nrel p/2\nparams a\n");
  auto ts = enumerate_pure_terms(tower, 2);
  REQUIRE(ts.size() == 3);
  CHECK(print_term(ts[0]) == "@a");
  CHECK(print_term(ts[1]) == "f(@a)");
  CHECK(print_term(ts[2]) == "f(f(@a))");

  Signature sig = demo_sig();
  std::vector<Term> prev;
  for (int d = 0; d <= 3; ++d) {
    auto cur = enumerate_pure_terms(sig, d);
    REQUIRE(cur.size() >= prev.size());
    for (size_t i = 0; i < prev.size(); ++i) CHECK(cur[i] == prev[i]);
    std::set<std::string> seen;
    for (const Term& t : cur) {
      CHECK(is_pure(t));
      CHECK(term_depth(t) <= d);
      CHECK(seen.insert(print_term(t)).second);
    }
    prev = cur;
  }
  // depth-0 stratum: parameters in P0 order, then constants in declaration order
  auto d0 = enumerate_pure_terms(sig, 0);
  REQUIRE(d0.size() == 3);
  CHECK(print_term(d0[0]) == "@a");
  CHECK(print_term(d0[1]) == "@b");
  CHECK(print_term(d0[2]) == "c");
}

TEST_CASE("universal closure binds free variables in first-occurrence order") {
  Formula m = Formula::implies(Formula::equal(Term::var("y"), Term::var("z")),
                               Formula::equal(Term::var("x"), Term::var("x")));
  Formula c = universal_closure(m);
  REQUIRE(c.kind() == FormulaKind::Forall);
  CHECK(c.name() == "y");
  CHECK(c.body().name() == "z");
  CHECK(c.body().body().name() == "x");
  CHECK(is_pure(c));
  CHECK(universal_closure(c) == c);
}

#include "plt/conservativity.hpp"

#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "util.hpp"

using namespace plt;

namespace {

TvValuation load_val(const std::string& vname, const std::string& sname) {
  return parse_valuation(slurp(fixture_path(vname)), load_signature(sname));
}

// parse text with the given free variables by closing over them and
// stripping the binders back off
Formula open_formula(const std::string& text, const Signature& sig,
                     const std::vector<std::string>& vars) {
  std::string full;
  for (const std::string& v : vars) full += "forall " + v + ". ";
  full += "(" + text + ")";
  Formula f = parse_formula(full, sig);
  for (size_t i = 0; i < vars.size(); ++i) f = f.body();
  return f;
}

SelectionSpec unary_p_spec(const Signature& sig, const std::string& fname) {
  SelectionSpec spec;
  spec.D = open_formula("p(x, y)", sig, {"x", "y"});
  spec.xs = {"x"};
  spec.y = "y";
  spec.fname = fname;
  return spec;
}

}  // namespace

TEST_CASE("epsilon axioms spell out definedness and witnessing") {
  Signature sig = load_signature("v0.sig");
  SelectionSpec spec = unary_p_spec(sig, "f");
  auto [first, second] = epsilon_axioms(spec);

  Signature ext = sig.with_function("f", 1);
  CHECK(first == parse_formula("forall x. (f(x)! -> exists y. p(x, y))", ext));
  CHECK(print_formula(first) == "forall x. (exists y. y = f(x)) -> (exists y. p(x, y))");
  CHECK(print_formula(second) ==
        "forall x. (exists y. p(x, y)) -> (exists y. y = f(x) & p(x, y))");
  CHECK(first == parse_formula(print_formula(first), ext));
  CHECK(second == parse_formula(print_formula(second), ext));

  SUBCASE("a 0-ary selector degenerates to an unquantified implication") {
    Signature csig = load_signature("constc.sig");
    SelectionSpec s0;
    s0.D = open_formula("p(y)", csig, {"y"});
    s0.y = "y";
    s0.fname = "e";
    auto [f1, f2] = epsilon_axioms(s0);
    Signature cext = csig.with_function("e", 0);
    CHECK(f1 == parse_formula("e! -> exists y. p(y)", cext));
    CHECK(print_formula(f1) == "(exists y. y = e) -> (exists y. p(y))");
    CHECK(print_formula(f2) == "(exists y. p(y)) -> (exists y. y = e & p(y))");
  }

  SUBCASE("variable names are taken from the spec, not hardwired") {
    SelectionSpec ren;
    ren.D = open_formula("p(u, w)", sig, {"u", "w"});
    ren.xs = {"u"};
    ren.y = "w";
    ren.fname = "g";
    auto [g1, g2] = epsilon_axioms(ren);
    Signature gext = sig.with_function("g", 1);
    CHECK(g1 == parse_formula("forall u. (g(u)! -> exists w. p(u, w))", gext));
    CHECK(g2 == parse_formula(
                    "forall u. ((exists w. p(u, w)) -> (exists w. w = g(u) & p(u, w)))", gext));
  }
}

TEST_CASE("unique existence and uniqueness prime the selected variable") {
  Signature sig = load_signature("v0.sig");
  SelectionSpec spec = unary_p_spec(sig, "f");

  Formula uex = unique_existence(spec);
  CHECK(print_formula(uex) == "p(x, y) & (forall y'. p(x, y') -> y' = y)");
  CHECK(uex == open_formula("p(x, y) & (forall y'. p(x, y') -> y' = y)", sig, {"x", "y"}));

  Formula uni = uniqueness(spec);
  CHECK(print_formula(uni) == "forall x. forall y. forall y'. p(x, y) & p(x, y') -> y' = y");
  CHECK(uni == parse_formula(print_formula(uni), sig));

  SUBCASE("the prime skips names already in use") {
    Signature sa = load_signature("sigA.sig");
    SelectionSpec clash;
    clash.D = open_formula("q(y) & r(y')", sa, {"y'", "y"});
    clash.xs = {"y'"};
    clash.y = "y";
    clash.fname = "sel";
    CHECK(print_formula(unique_existence(clash)) ==
          "q(y) & r(y') & (forall y''. q(y'') & r(y') -> y'' = y)");
    CHECK(print_formula(uniqueness(clash)) ==
          "forall y'. forall y. forall y''. q(y) & r(y') & (q(y'') & r(y')) -> y'' = y");
  }

  SUBCASE("a formula without the selected variable still gets the guard") {
    SelectionSpec closed;
    closed.D = parse_formula("p(@a, @a)", sig);
    closed.y = "y";
    closed.fname = "e";
    Formula u3 = unique_existence(closed);
    CHECK(print_formula(u3) == "p(@a, @a) & (forall y'. p(@a, @a) -> y' = y)");
    CHECK(has_free_var(u3, "y"));
  }
}

TEST_CASE("the iota axiom chains both directions") {
  Signature sig = load_signature("v0.sig");
  SelectionSpec spec = unary_p_spec(sig, "f");
  Formula io = iota_axiom(spec);
  CHECK(print_formula(io) ==
        "forall x. forall y. (f(x) = y -> p(x, y) & (forall y'. p(x, y') -> y' = y)) & "
        "(p(x, y) & (forall y'. p(x, y') -> y' = y) -> f(x) = y)");
  Signature ext = sig.with_function("f", 1);
  CHECK(io == parse_formula(print_formula(io), ext));
  CHECK(free_vars(io).empty());

  Signature csig = load_signature("constc.sig");
  SelectionSpec s0;
  s0.D = open_formula("p(y)", csig, {"y"});
  s0.y = "y";
  s0.fname = "e";
  CHECK(print_formula(iota_axiom(s0)) ==
        "forall y. (e = y -> p(y) & (forall y'. p(y') -> y' = y)) & "
        "(p(y) & (forall y'. p(y') -> y' = y) -> e = y)");
}

TEST_CASE("selection specs reject collisions and stray variables") {
  Signature sig = load_signature("v0.sig");
  SelectionSpec spec = unary_p_spec(sig, "f");
  CHECK_NOTHROW(spec.validate(sig));

  SelectionSpec bad = spec;
  bad.fname = "";
  CHECK_THROWS_AS(bad.validate(sig), error);
  bad.fname = "p";  // relation already declared
  CHECK_THROWS_AS(bad.validate(sig), error);
  bad.fname = "a";  // parameter name
  CHECK_THROWS_AS(bad.validate(sig), error);
  bad.fname = "undef";
  CHECK_THROWS_AS(bad.validate(sig), error);
  bad.fname = "forall";
  CHECK_THROWS_AS(bad.validate(sig), error);

  bad = spec;
  bad.xs = {"x", "x"};
  CHECK_THROWS_AS(bad.validate(sig), error);
  bad.xs = {"y"};
  CHECK_THROWS_AS(bad.validate(sig), error);

  bad = spec;
  bad.D = open_formula("p(x, z)", sig, {"x", "z"});
  CHECK_THROWS_AS(bad.validate(sig), error);
}

TEST_CASE("epsilon extension lifts a total valuation and tabulates witnesses") {
  TvValuation v = load_val("peq.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(v.sig, "f");
  EpsilonExtension ee = epsilon_extend(v, spec, 2);

  CHECK(ee.baseLifted);
  CHECK(ee.base.sig.hasUndef);
  CHECK(ee.interp.symbol == "f");
  CHECK(ee.interp.arity == 1);
  REQUIRE(ee.interp.table.size() == 1);
  CHECK(print_term(ee.interp.table[0].first[0]) == "@a");
  CHECK(print_term(ee.interp.table[0].second) == "@a");
  CHECK(print_term(ee.interp.fallback) == "undef");

  CHECK(ee.extended.atom_value(parse_formula("f(@a) = @a", ee.ctx.extended)));
  CHECK(!ee.extended.atom_value(parse_formula("f(@b) = @a", ee.ctx.extended)));
  CHECK(!ee.extended.atom_value(parse_formula("f(@b) = @b", ee.ctx.extended)));
  CHECK(!is_denoting(ee.extended, parse_term("f(@b)", ee.ctx.extended)));

  auto [first, second] = epsilon_axioms(spec);
  CHECK(eval(ee.extended, first) == Tri::True);
  CHECK(eval(ee.extended, second) == Tri::True);
}

TEST_CASE("a non-total valuation keeps its base and defaults to the first gap") {
  TvValuation c = load_val("constc.val", "constc.sig");
  SelectionSpec s0;
  s0.D = open_formula("p(y)", c.sig, {"y"});
  s0.y = "y";
  s0.fname = "e";
  EpsilonExtension ee = epsilon_extend(c, s0, 1);

  CHECK(!ee.baseLifted);
  CHECK(print_signature(ee.base.sig) == print_signature(c.sig));
  CHECK(ee.interp.arity == 0);
  CHECK(ee.interp.table.empty());
  CHECK(print_term(ee.interp.fallback) == "c");
  CHECK(!is_denoting(ee.extended, parse_term("e", ee.ctx.extended)));
  auto [a1, a2] = epsilon_axioms(s0);
  CHECK(eval(ee.extended, a1) == Tri::True);
  CHECK(eval(ee.extended, a2) == Tri::True);

  SUBCASE("a satisfiable selection formula gives the constant a denotation") {
    SelectionSpec s1 = s0;
    s1.D = open_formula("p(y) | y = y", c.sig, {"y"});
    EpsilonExtension e1 = epsilon_extend(c, s1, 1);
    CHECK(print_term(e1.interp.fallback) == "@a");
    CHECK(is_denoting(e1.extended, parse_term("e", e1.ctx.extended)));
  }

  SUBCASE("the gap search respects the depth bound") {
    TvValuation ft = load_val("ftower.val", "ftower.sig");
    SelectionSpec fs = unary_p_spec(ft.sig, "sel");
    CHECK_THROWS_WITH_AS(epsilon_extend(ft, fs, 0), "no non-denoting term within depth 0",
                         error);
    EpsilonExtension fe = epsilon_extend(ft, fs, 1);
    CHECK(!fe.baseLifted);
    CHECK(print_term(fe.interp.fallback) == "f(@a)");
    CHECK(fe.interp.table.empty());
    auto [fa1, fa2] = epsilon_axioms(fs);
    CHECK(eval(fe.extended, fa1) == Tri::True);
    CHECK(eval(fe.extended, fa2) == Tri::True);
  }
}

TEST_CASE("broken equality blocks the selection construction") {
  Signature sig = load_signature("v0.sig");
  TvValuation bad = parse_valuation(
      "domain a b\ndefault f\natom @a = @a : t\natom @b = @b : t\natom @a = @b : t\n", sig);
  SelectionSpec spec = unary_p_spec(sig, "f");
  bool threw = false;
  try {
    epsilon_extend(bad, spec, 1);
  } catch (const error& e) {
    threw = true;
    CHECK(std::string(e.what()).find("Symm fails at") != std::string::npos);
  }
  CHECK(threw);
}

TEST_CASE("verification passes on the worked fixtures") {
  struct Fx {
    const char* val;
    const char* sig;
    const char* fname;
    bool lifted;
    bool strict;
  };
  const Fx fxs[] = {
      {"v0.val", "v0.sig", "f", true, true},
      {"peq.val", "v0.sig", "f", true, true},
      {"pmulti.val", "v0.sig", "f", true, true},
      {"ftower.val", "ftower.sig", "sel", false, false},
  };
  for (const Fx& fx : fxs) {
    for (const char* kind : {"epsilon", "iota"}) {
      CAPTURE(fx.val);
      CAPTURE(kind);
      TvValuation v = load_val(fx.val, fx.sig);
      SelectionSpec spec = unary_p_spec(v.sig, fx.fname);
      ConservativityReport rep = verify_conservativity(v, spec, kind, 2);
      CHECK(rep.pass);
      CHECK(rep.depth == 2);
      CHECK(rep.baseLifted == fx.lifted);
      CHECK(rep.equalityPreserved);
      if (fx.strict) {
        REQUIRE(rep.strictnessPreserved.has_value());
        CHECK(*rep.strictnessPreserved);
      } else {
        CHECK(!rep.strictnessPreserved.has_value());
      }
      REQUIRE(rep.axioms.size() == (std::string(kind) == "epsilon" ? 2u : 1u));
      for (const AxiomCheck& ax : rep.axioms) {
        CHECK(ax.pass);
        CHECK(ax.witness.empty());
      }
    }
  }

  TvValuation v = load_val("v0.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(v.sig, "f");
  ConservativityReport rep = verify_conservativity(v, spec, "epsilon", 2);
  REQUIRE(rep.axioms.size() == 2);
  CHECK(rep.axioms[0].name == "epsilon-1");
  CHECK(rep.axioms[1].name == "epsilon-2");
  CHECK(verify_conservativity(v, spec, "iota", 2).axioms[0].name == "iota");

  SUBCASE("a 0-ary selection verifies without lifting") {
    TvValuation c = load_val("constc.val", "constc.sig");
    SelectionSpec s0;
    s0.D = open_formula("p(y)", c.sig, {"y"});
    s0.y = "y";
    s0.fname = "e";
    for (const char* kind : {"epsilon", "iota"}) {
      CAPTURE(kind);
      ConservativityReport r = verify_conservativity(c, s0, kind, 1);
      CHECK(r.pass);
      CHECK(!r.baseLifted);
      CHECK(!r.strictnessPreserved.has_value());
      CHECK(r.interpretation.find("extend const e -> c") != std::string::npos);
    }
  }
}

TEST_CASE("epsilon and iota select different interpretations when witnesses collide") {
  TvValuation pm = load_val("pmulti.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(pm.sig, "f");

  ConservativityReport re = verify_conservativity(pm, spec, "epsilon", 2);
  ConservativityReport ri = verify_conservativity(pm, spec, "iota", 2);
  CHECK(re.pass);
  CHECK(ri.pass);
  // two witnesses at @a: epsilon picks the first, iota leaves f(@a) undefined
  CHECK(re.interpretation.find("map (@a) -> @a") != std::string::npos);
  CHECK(ri.interpretation.find("map") == std::string::npos);
  CHECK(ri.interpretation.find("extend fun f/1 default undef") != std::string::npos);
}

TEST_CASE("unique selection satisfies the descriptive equation") {
  TvValuation v = load_val("peq.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(v.sig, "f");
  CHECK(eval(v, uniqueness(spec)) == Tri::True);

  SelectionSpec guarded = spec;
  guarded.D = unique_existence(spec);
  EpsilonExtension ee = epsilon_extend(v, guarded, 2);
  Formula descr = parse_formula(
      "forall x. forall y. (f(x) = y -> p(x, y)) & (p(x, y) -> f(x) = y)", ee.ctx.extended);
  CHECK(eval(ee.extended, descr) == Tri::True);

  TvValuation pm = load_val("pmulti.val", "v0.sig");
  CHECK(eval(pm, uniqueness(spec)) == Tri::False);
  EpsilonExtension e2 = epsilon_extend(pm, guarded, 2);
  Formula descr2 = parse_formula(
      "forall x. forall y. (f(x) = y -> p(x, y)) & (p(x, y) -> f(x) = y)", e2.ctx.extended);
  CHECK(eval(e2.extended, descr2) == Tri::False);
}

TEST_CASE("witnesses name the failing instance") {
  TvValuation v = load_val("peq.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(v.sig, "f");
  EpsilonExtension ee = epsilon_extend(v, spec, 2);

  TvValuation bad = ee.extended;
  auto inner = bad.computed;
  bad.computed = [inner](const Formula& atom) {
    if (atom.kind() == FormulaKind::Atom && atom.name() == "p")
      return print_formula(atom) == "p(@a, @b)";
    return inner(atom);
  };

  ConservativityReport rep = verify_conservativity(v, spec, "epsilon", 2, &bad);
  CHECK(!rep.pass);
  REQUIRE(rep.axioms.size() == 2);
  CHECK(rep.axioms[0].pass);
  CHECK(!rep.axioms[1].pass);
  CHECK(rep.axioms[1].name == "epsilon-2");
  CHECK(rep.axioms[1].witness == "x = @a");
}

TEST_CASE("conservativity reports are deterministic") {
  TvValuation pm = load_val("pmulti.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(pm.sig, "f");
  auto dump = [](const ConservativityReport& r) {
    std::ostringstream ss;
    ss << r.pass << "|" << r.baseLifted << "|" << r.equalityPreserved << "|"
       << (r.strictnessPreserved ? (*r.strictnessPreserved ? "s" : "n") : "-") << "|"
       << r.interpretation;
    for (const AxiomCheck& ax : r.axioms) ss << "|" << ax.name << ":" << ax.pass << ":" << ax.witness;
    return ss.str();
  };
  CHECK(dump(verify_conservativity(pm, spec, "iota", 2)) ==
        dump(verify_conservativity(pm, spec, "iota", 2)));
  CHECK(dump(verify_conservativity(pm, spec, "epsilon", 2)) ==
        dump(verify_conservativity(pm, spec, "epsilon", 2)));
}

TEST_CASE("unknown conservativity kinds are rejected") {
  TvValuation v = load_val("v0.val", "v0.sig");
  SelectionSpec spec = unary_p_spec(v.sig, "f");
  CHECK_THROWS_AS(verify_conservativity(v, spec, "delta", 1), error);
}

#include <set>

#include "doctest.h"
#include "plt/extension.hpp"
#include "util.hpp"

using namespace plt;

namespace {

Formula pf(const std::string& s, const Signature& sig) { return parse_formula(s, sig); }

TvValuation load_valuation(const std::string& stem) {
  Signature sig = load_signature(stem + ".sig");
  return parse_valuation(slurp(fixture_path(stem + ".val")), sig);
}

// v0 plus a fresh constant interpreted as @a
ExtensionContext cprime_ctx(const Signature& v0sig) {
  return parse_extension("extend const cp -> @a\n", v0sig);
}

}  // namespace

TEST_CASE("phi fixes base terms and resolves new symbols") {
  Signature sig = load_signature("sigA.sig");
  ExtensionContext ctx = parse_extension("extend const cp -> @a\n", sig);
  for (const Term& t : enumerate_pure_terms(sig, 2)) CHECK(phi(ctx, t) == t);

  Term cp = parse_term("cp", ctx.extended);
  CHECK(phi(ctx, cp) == parse_term("@a", sig));
  CHECK(phi(ctx, parse_term("f(cp)", ctx.extended)) == parse_term("f(@a)", sig));
  CHECK(phi(ctx, Term::apply("f", {Term::apply("f", {cp})})) == parse_term("f(f(@a))", sig));

  CHECK_THROWS_AS(phi(ctx, Term::var("x")), error);
  CHECK_THROWS_AS(phi(ctx, Term::apply("mystery", {})), error);
}

TEST_CASE("interpretation tables fall back to the default") {
  Signature sig = load_signature("sigA.sig");
  ExtensionContext ctx = parse_extension(
      "extend fun g/2 default @a\n"
      "extend fun g/2 map (f(@a), @b) -> @b\n"
      "extend fun g/2 map (@a, @a) -> @c\n",
      sig);
  const FunctionInterpretation& g = ctx.interpretations[0];
  CHECK(g.apply({parse_term("f(@a)", sig), parse_term("@b", sig)}) == parse_term("@b", sig));
  CHECK(g.apply({parse_term("@a", sig), parse_term("@a", sig)}) == parse_term("@c", sig));
  CHECK(g.apply({parse_term("@d", sig), parse_term("@d", sig)}) == parse_term("@a", sig));
  CHECK_THROWS_AS(g.apply({parse_term("@a", sig)}), error);

  CHECK(phi(ctx, parse_term("g(f(@a), @b)", ctx.extended)) == parse_term("@b", sig));
  // phi projects arguments before the table lookup
  CHECK(phi(ctx, Term::apply("g", {Term::apply("g", {Term::param("a"), Term::param("a")}),
                                   Term::param("d")})) == parse_term("@a", sig));
}

TEST_CASE("extension files round-trip and reject malformed input") {
  Signature sig = load_signature("sigA.sig");
  std::string text =
      "extend fun g/2 default @a\n"
      "extend fun g/2 map (f(@a), @b) -> @a\n"
      "extend const cp -> @b\n"
      "extend rel s/1\n";
  ExtensionContext ctx = parse_extension(text, sig);
  CHECK(print_extension(ctx) == text);
  CHECK(parse_extension(print_extension(ctx), sig).extended.function_arity("g") == 2);
  CHECK(ctx.extended.relation_arity("s") == 1);

  CHECK_THROWS_AS(parse_extension("widen rel s/1\n", sig), error);
  CHECK_THROWS_AS(parse_extension("extend rel s\n", sig), error);
  CHECK_THROWS_AS(parse_extension("extend fun g/2 map (@a, @a) -> @a\n", sig), error);
  CHECK_THROWS_AS(parse_extension("extend fun p/1 default @a\n", sig), error);  // p taken
  CHECK_THROWS_AS(parse_extension("extend const undef -> @a\n", sig), error);
  CHECK_THROWS_AS(parse_extension("extend fun g/0 default @a\n", sig), error);
  CHECK_THROWS_AS(parse_extension("extend const cp -> x\n", sig), error);
  CHECK_THROWS_AS(parse_extension("extend const cp -> @a\nextend const cp -> @b\n", sig), error);
  // new symbols may not appear in interpretation terms
  CHECK_THROWS_AS(parse_extension("extend const cp -> @a\nextend const dq -> cp\n", sig), error);
}

TEST_CASE("the projected valuation answers through the base table") {
  TvValuation v0 = load_valuation("v0");
  ExtensionContext ctx = cprime_ctx(v0.sig);
  TvValuation v1 = extend_valuation(v0, ctx);

  CHECK(v1.atom_value(pf("p(cp, @a)", ctx.extended)));       // = v0(p(a,a)) = t
  CHECK_FALSE(v1.atom_value(pf("cp = @b", ctx.extended)));   // = v0(a=b) = f
  CHECK(v1.atom_value(pf("cp = @a", ctx.extended)));
  CHECK(v1.atom_value(pf("cp = cp", ctx.extended)));

  for (const std::string s : {"forall x. exists y. p(x, y)", "exists x. forall y. p(x, y)",
                              "forall x. x = x", "p(@a, @b) -> false"}) {
    CAPTURE(s);
    CHECK(eval(v1, pf(s, ctx.extended)) == eval(v0, pf(s, v0.sig)));
  }

  ExtensionContext rel = parse_extension("extend rel s/2\n", v0.sig);
  TvValuation v2 = extend_valuation(v0, rel);
  CHECK_FALSE(v2.atom_value(pf("s(@a, @b)", rel.extended)));
  CHECK(eval(v2, pf("forall x. forall y. (s(x, y) -> false)", rel.extended)) == Tri::True);
}

TEST_CASE("congruence of interpretations is decided by brute force") {
  TvValuation v0 = load_valuation("v0");
  ExtensionContext ctx = parse_extension(
      "extend fun g/1 default @a\n", v0.sig);
  CHECK(is_congruent(v0, ctx.interpretations[0], 2));  // constant maps are always congruent

  // identity is congruent when equality is the identity relation
  ExtensionContext idc = parse_extension(
      "extend fun g/1 default @a\n"
      "extend fun g/1 map (@b) -> @b\n",
      v0.sig);
  CHECK(is_congruent(v0, idc.interpretations[0], 2));

  // collapse a and b, then send them apart: not congruent
  Signature abc = parse_signature("rel p/1\nparams a b c");
  TvValuation w;
  w.sig = abc;
  w.domain = {"a", "b", "c"};
  for (const std::string s : {"@a = @a", "@b = @b", "@c = @c", "@a = @b", "@b = @a"})
    w.atoms.emplace_back(pf(s, abc), true);
  w.validate();
  REQUIRE(check_equality_valuation(w, 1).pass);
  ExtensionContext broken = parse_extension(
      "extend fun g/1 default @a\n"
      "extend fun g/1 map (@b) -> @c\n",
      abc);
  CHECK_FALSE(is_congruent(w, broken.interpretations[0], 1));
  CHECK_THROWS_AS(extend_valuation(w, broken), error);

  // representative-choosing map over the collapsed valuation is congruent
  ExtensionContext reps = parse_extension(
      "extend fun g/1 default @a\n"
      "extend fun g/1 map (@c) -> @c\n",
      abc);
  CHECK(is_congruent(w, reps.interpretations[0], 1));
  TvValuation wext = extend_valuation(w, reps);
  CHECK(wext.atom_value(pf("g(@b) = @a", reps.extended)));
}

TEST_CASE("strictness of interpretations tracks denotation of results") {
  TvValuation cc = load_valuation("constc");
  // result c never denotes, so the condition is vacuous
  ExtensionContext vac = parse_extension("extend fun g/1 default c\n", cc.sig);
  CHECK(is_strict_interp(cc, vac.interpretations[0], 1));
  // result @a denotes even when the argument is the non-denoting c
  ExtensionContext bad = parse_extension("extend fun g/1 default @a\n", cc.sig);
  CHECK_FALSE(is_strict_interp(cc, bad.interpretations[0], 1));
  // repaired: the non-denoting tuple is mapped to a non-denoting result
  ExtensionContext ok = parse_extension(
      "extend fun g/1 default @a\n"
      "extend fun g/1 map (c) -> c\n",
      cc.sig);
  CHECK(is_strict_interp(cc, ok.interpretations[0], 1));
}

TEST_CASE("the undefined lift decides equality by closure") {
  TvValuation v0 = load_valuation("v0");
  LiftedValuation lv = lift_undefined(v0);
  Term undef = parse_term("undef", lv.lifted.sig);
  Term a = parse_term("@a", v0.sig), b = parse_term("@b", v0.sig);

  CHECK(eq_up(lv, undef, undef));
  CHECK_FALSE(eq_up(lv, a, undef));
  CHECK_FALSE(eq_up(lv, undef, a));
  CHECK(eq_up(lv, a, a));
  CHECK_FALSE(eq_up(lv, a, b));
  CHECK_FALSE(is_denoting(lv.lifted, undef));
  CHECK(is_totally_denoting(v0));
  CHECK_FALSE(is_totally_denoting(lv.lifted));

  CHECK(lv.lifted.atom_value(pf("undef = undef", lv.lifted.sig)));
  CHECK_FALSE(lv.lifted.atom_value(pf("p(undef, @a)", lv.lifted.sig)));
  for (const std::string s : {"forall x. exists y. p(x, y)", "exists x. forall y. p(x, y)",
                              "forall x. x = x", "p(@b, @a)"}) {
    CAPTURE(s);
    CHECK(eval(lv.lifted, pf(s, lv.lifted.sig)) == eval(v0, pf(s, v0.sig)));
  }
  CHECK(check_equality_valuation(lv.lifted, 2).pass);

  CHECK_THROWS_AS(lift_undefined(load_valuation("constc")), error);  // c never denotes
  CHECK_THROWS_AS(lift_undefined(lv.lifted), error);                 // already lifted
}

TEST_CASE("congruence closure reaches function images in the lift") {
  Signature sig = parse_signature("fun g/1\nrel p/1\nparams a b");
  TvValuation v;
  v.sig = sig;
  v.domain = {"a", "b"};
  // one equivalence class {a, b}; g collapses to a
  for (const std::string s :
       {"@a = @a", "@b = @b", "@a = @b", "@b = @a", "g(@a) = @a", "@a = g(@a)",
        "g(@b) = @a", "@a = g(@b)", "g(@a) = g(@a)", "g(@b) = g(@b)", "g(@a) = g(@b)",
        "g(@b) = g(@a)", "g(@a) = @b", "@b = g(@a)", "g(@b) = @b", "@b = g(@b)"})
    v.atoms.emplace_back(pf(s, sig), true);
  v.validate();
  REQUIRE(is_totally_denoting(v));
  LiftedValuation lv = lift_undefined(v);

  Term ga = parse_term("g(@a)", sig), gb = parse_term("g(@b)", sig);
  CHECK(eq_up(lv, ga, gb));
  // deeper images are equated only through the head-symbol clause
  Term gga = Term::apply("g", {ga}), ggb = Term::apply("g", {gb});
  CHECK_FALSE(v.atom_value(Formula::equal(gga, ggb)));  // the base table stops at depth 1
  CHECK(eq_up(lv, gga, ggb));
  CHECK_FALSE(eq_up(lv, Term::apply("g", {Term::apply("undef", {})}), gga));
  CHECK(eq_up(lv, Term::apply("g", {Term::apply("undef", {})}),
              Term::apply("g", {Term::apply("undef", {})})));

  // mixed undef equalities never cross into the base language
  CHECK_FALSE(eq_up(lv, Term::apply("undef", {}), ga));
}

TEST_CASE("eq_up equates only terms sharing their undef pattern") {
  auto scan = [](const LiftedValuation& lv, int depth) {
    std::vector<Term> terms =
        enumerate_pure_terms(lv.lifted.sig.with_params(lv.lifted.domain), depth);
    for (const Term& r : terms)
      for (const Term& s : terms)
        if (eq_up(lv, r, s)) {
          bool ur = print_term(r).find("undef") != std::string::npos;
          bool us = print_term(s).find("undef") != std::string::npos;
          CHECK(ur == us);
        }
  };
  scan(lift_undefined(load_valuation("v0")), 3);

  // total collapse: every g-tower over a denotes, so the base lifts
  Signature sig = parse_signature("fun g/1\nparams a");
  TvValuation v = parse_valuation("domain a\ndefault f\nrule g^n(@a) = g^m(@a) : t\n", sig);
  scan(lift_undefined(v), 3);
}

TEST_CASE("the projection equations audit cleanly at depth two") {
  TvValuation v0 = load_valuation("v0");
  ExtensionContext ctx = cprime_ctx(v0.sig);
  std::vector<Formula> samples = {
      Formula::atom("p", {Term::var("x"), Term::var("y")}),
      Formula::equal(Term::var("x"), Term::var("y")),
      Formula::exists("y", Formula::atom("p", {Term::var("x"), Term::var("y")})),
  };
  ExtensionCheckReport rep = check_extension_property(v0, ctx, samples, 2);
  CHECK(rep.pass);
  CHECK(rep.mismatches.empty());

  // flipping one projected atom must surface with a witnessing instance
  TvValuation corrupted = extend_valuation(v0, ctx);
  auto inner = corrupted.computed;
  Formula target = pf("p(cp, @a)", ctx.extended);
  corrupted.computed = [inner, target](const Formula& atom) {
    if (atom == target) return !inner(atom);
    return inner(atom);
  };
  ExtensionCheckReport bad = check_extension_property(v0, ctx, samples, 1, &corrupted);
  CHECK_FALSE(bad.pass);
  REQUIRE(!bad.mismatches.empty());
  bool witnessed = false;
  for (const std::string& m : bad.mismatches)
    if (m.find("p(cp, @a)") != std::string::npos) witnessed = true;
  CHECK(witnessed);

  // pure samples reduce to plain agreement on evaluation
  std::vector<Formula> pure = {pf("forall x. exists y. p(x, y)", v0.sig)};
  CHECK(check_extension_property(v0, ctx, pure, 1).pass);
}

TEST_CASE("extensions preserve total denotation and strictness") {
  TvValuation v0 = load_valuation("v0");
  ExtensionContext ctx = parse_extension(
      "extend const cp -> @a\n"
      "extend fun g/1 default @b\n",
      v0.sig);
  TvValuation vext = extend_valuation(v0, ctx);

  REQUIRE(is_totally_denoting(v0));
  CHECK(is_totally_denoting(vext));
  for (const Term& t : enumerate_pure_terms(vext.sig.with_params(vext.domain), 2))
    CHECK(is_denoting(vext, t));

  REQUIRE(check_strict(v0, 2).pass);
  for (const FunctionInterpretation& fi : ctx.interpretations)
    CHECK(is_strict_interp(v0, fi, 2));
  CHECK(check_strict(vext, 2).pass);
}

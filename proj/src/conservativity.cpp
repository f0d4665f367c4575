#include "plt/conservativity.hpp"

#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "tuples.hpp"

namespace plt {

using tupledetail::TupleIter;

namespace {

Term selector_term(const SelectionSpec& spec) {
  std::vector<Term> args;
  for (const std::string& x : spec.xs) args.push_back(Term::var(x));
  return Term::apply(spec.fname, std::move(args));
}

// y', y'', ... avoiding the declared variables and everything free in D
std::string fresh_prime(const SelectionSpec& spec) {
  std::set<std::string> avoid = free_vars(spec.D);
  avoid.insert(spec.xs.begin(), spec.xs.end());
  avoid.insert(spec.y);
  std::string yp = spec.y + "'";
  while (avoid.count(yp)) yp += "'";
  return yp;
}

Formula close_over(const std::vector<std::string>& vars, Formula f) {
  for (size_t i = vars.size(); i-- > 0;) f = Formula::forall(vars[i], std::move(f));
  return f;
}

}  // namespace

void SelectionSpec::validate(const Signature& sig) const {
  if (fname.empty()) throw error("selection needs a function name");
  // throws when fname collides with a declared or reserved name
  sig.with_function(fname, int(xs.size())).validate();
  std::set<std::string> declared;
  for (const std::string& x : xs)
    if (x.empty() || !declared.insert(x).second)
      throw error("selection variables must be distinct, got " + x + " twice");
  if (y.empty() || declared.count(y))
    throw error("the selected variable must be distinct from the argument variables");
  declared.insert(y);
  for (const std::string& fv : free_vars(D))
    if (!declared.count(fv))
      throw error("free variable " + fv + " of the selection formula is not declared");
}

std::pair<Formula, Formula> epsilon_axioms(const SelectionSpec& spec) {
  Term ft = selector_term(spec);
  Formula existsD = Formula::exists(spec.y, spec.D);
  Formula first = close_over(spec.xs, Formula::implies(definedness(ft), existsD));
  Formula chosen = Formula::exists(
      spec.y, Formula::conj(Formula::equal(Term::var(spec.y), ft), spec.D));
  Formula second = close_over(spec.xs, Formula::implies(existsD, std::move(chosen)));
  return {std::move(first), std::move(second)};
}

Formula unique_existence(const SelectionSpec& spec) {
  std::string yp = fresh_prime(spec);
  Formula shifted = substitute(spec.D, {{spec.y, Term::var(yp)}});
  Formula atMostOne = Formula::forall(
      yp, Formula::implies(std::move(shifted),
                           Formula::equal(Term::var(yp), Term::var(spec.y))));
  return Formula::conj(spec.D, std::move(atMostOne));
}

Formula iota_axiom(const SelectionSpec& spec) {
  Formula uniq = unique_existence(spec);
  Formula eq = Formula::equal(selector_term(spec), Term::var(spec.y));
  Formula body = Formula::conj(Formula::implies(eq, uniq), Formula::implies(uniq, eq));
  std::vector<std::string> vars = spec.xs;
  vars.push_back(spec.y);
  return close_over(vars, std::move(body));
}

Formula uniqueness(const SelectionSpec& spec) {
  std::string yp = fresh_prime(spec);
  Formula shifted = substitute(spec.D, {{spec.y, Term::var(yp)}});
  Formula body = Formula::implies(Formula::conj(spec.D, std::move(shifted)),
                                  Formula::equal(Term::var(yp), Term::var(spec.y)));
  std::vector<std::string> vars = spec.xs;
  vars.push_back(spec.y);
  vars.push_back(yp);
  return close_over(vars, std::move(body));
}

EpsilonExtension epsilon_extend(const TvValuation& v, const SelectionSpec& spec, int depth) {
  spec.validate(v.sig);
  ValuationCheckReport eq = check_equality_valuation(v, depth);
  if (!eq.pass)
    throw error("selection needs the equality axioms at depth " + std::to_string(depth) +
                ", but " + eq.violations.front());

  EpsilonExtension ee;
  if (is_totally_denoting(v)) {
    ee.baseLifted = true;
    ee.base = lift_undefined(v).lifted;
  } else {
    ee.base = v;
  }

  Term t0 = Term::apply("undef", {});
  if (!ee.baseLifted) {
    bool found = false;
    for (const Term& t : enumerate_pure_terms(v.sig.with_params(v.domain), depth)) {
      if (!is_denoting(v, t)) {
        t0 = t;
        found = true;
        break;
      }
    }
    if (!found) throw error("no non-denoting term within depth " + std::to_string(depth));
  }

  size_t n = spec.xs.size();
  // the first domain parameter satisfying D at the tuple's representatives,
  // or nothing when an argument fails to denote or no parameter qualifies
  auto chosen = [&](const std::vector<Term>& args) -> std::optional<Term> {
    std::map<std::string, Term> bind;
    for (size_t i = 0; i < n; ++i) {
      auto rep = representative(ee.base, args[i]);
      if (!rep) return std::nullopt;
      bind.emplace(spec.xs[i], Term::param(*rep));
    }
    for (const std::string& b : ee.base.domain) {
      std::map<std::string, Term> full = bind;
      full.emplace(spec.y, Term::param(b));
      if (eval(ee.base, substitute(spec.D, full)) == Tri::True) return Term::param(b);
    }
    return std::nullopt;
  };

  FunctionInterpretation fi;
  fi.symbol = spec.fname;
  fi.arity = int(n);
  fi.fallback = t0;
  if (n == 0) {
    if (auto w = chosen({})) fi.fallback = *w;
  } else {
    std::vector<Term> terms = enumerate_pure_terms(ee.base.sig.with_params(ee.base.domain), depth);
    TupleIter it(n, terms.size());
    if (!it.done) do {
      std::vector<Term> args;
      for (size_t i = 0; i < n; ++i) args.push_back(terms[it.idx[i]]);
      if (auto w = chosen(args)) fi.table.emplace_back(std::move(args), std::move(*w));
    } while (it.next());
  }

  ee.interp = fi;
  ee.ctx.base = ee.base.sig;
  ee.ctx.extended = ee.base.sig.with_function(spec.fname, int(n));
  ee.ctx.interpretations.push_back(std::move(fi));
  ee.extended = extend_valuation(ee.base, ee.ctx, depth);
  return ee;
}

ConservativityReport verify_conservativity(const TvValuation& v, const SelectionSpec& spec,
                                           const std::string& kind, int depth,
                                           const TvValuation* extended) {
  if (kind != "epsilon" && kind != "iota")
    throw error("unknown conservativity kind: " + kind);

  SelectionSpec sel = spec;
  if (kind == "iota") sel.D = unique_existence(spec);
  EpsilonExtension ee = epsilon_extend(v, sel, depth);
  const TvValuation& audit = extended ? *extended : ee.extended;

  ConservativityReport rep;
  rep.depth = depth;
  rep.baseLifted = ee.baseLifted;
  rep.interpretation = print_extension(ee.ctx);

  // open axiom bodies with the variables to instantiate at domain parameters
  std::vector<std::tuple<std::string, std::vector<std::string>, Formula>> checks;
  Term ft = selector_term(spec);
  if (kind == "epsilon") {
    Formula existsD = Formula::exists(spec.y, spec.D);
    checks.emplace_back("epsilon-1", spec.xs,
                        Formula::implies(definedness(ft), existsD));
    checks.emplace_back(
        "epsilon-2", spec.xs,
        Formula::implies(existsD,
                         Formula::exists(spec.y, Formula::conj(Formula::equal(Term::var(spec.y), ft),
                                                               spec.D))));
  } else {
    Formula uniq = unique_existence(spec);
    Formula eq = Formula::equal(ft, Term::var(spec.y));
    std::vector<std::string> vars = spec.xs;
    vars.push_back(spec.y);
    checks.emplace_back("iota", std::move(vars),
                        Formula::conj(Formula::implies(eq, uniq), Formula::implies(uniq, eq)));
  }

  rep.pass = true;
  for (auto& [name, vars, body] : checks) {
    AxiomCheck ac;
    ac.name = name;
    TupleIter it(vars.size(), audit.domain.size());
    if (!it.done) do {
      std::map<std::string, Term> bind;
      std::ostringstream where;
      for (size_t i = 0; i < vars.size(); ++i) {
        const std::string& p = audit.domain[it.idx[i]];
        bind.emplace(vars[i], Term::param(p));
        if (i) where << ", ";
        where << vars[i] << " = @" << p;
      }
      if (eval(audit, substitute(body, bind)) != Tri::True) {
        ac.pass = false;
        ac.witness = where.str();
        break;
      }
    } while (it.next());
    rep.pass = rep.pass && ac.pass;
    rep.axioms.push_back(std::move(ac));
  }

  rep.equalityPreserved = check_equality_valuation(audit, depth).pass;
  if (check_strict(v, depth).pass && is_strict_interp(ee.base, ee.interp, depth))
    rep.strictnessPreserved = check_strict(audit, depth).pass;
  return rep;
}

}  // namespace plt

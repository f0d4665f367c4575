#include "plt/deduction.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace plt {

namespace {

constexpr std::pair<RuleKind, const char*> kRuleNames[] = {
    {RuleKind::Assume, "assume"},   {RuleKind::AndI, "andI"},
    {RuleKind::AndEL, "andE_L"},    {RuleKind::AndER, "andE_R"},
    {RuleKind::OrIL, "orI_L"},      {RuleKind::OrIR, "orI_R"},
    {RuleKind::OrE, "orE"},         {RuleKind::ImpI, "impI"},
    {RuleKind::ImpE, "impE"},       {RuleKind::NotI, "notI"},
    {RuleKind::NotE, "notE"},       {RuleKind::FalsumE, "falsumE"},
    {RuleKind::Raa, "raa"},         {RuleKind::ForallI, "forallI"},
    {RuleKind::ForallE, "forallE"}, {RuleKind::ExistsI, "existsI"},
    {RuleKind::ExistsE, "existsE"}, {RuleKind::Axiom, "axiom"},
};

constexpr std::pair<AxiomClass, const char*> kClassNames[] = {
    {AxiomClass::Rfl, "rfl"},
    {AxiomClass::Sbst, "sbst"},
    {AxiomClass::Definedness, "definedness"},
    {AxiomClass::StrictConst, "strictConst"},
    {AxiomClass::StrictFun, "strictFun"},
    {AxiomClass::StrictRel, "strictRel"},
};

}  // namespace

std::string to_string(RuleKind k) {
  for (auto [r, n] : kRuleNames)
    if (r == k) return n;
  return "?";
}

std::optional<RuleKind> rule_kind_from(const std::string& name) {
  for (auto [r, n] : kRuleNames)
    if (name == n) return r;
  return std::nullopt;
}

std::string to_string(AxiomClass c) {
  for (auto [k, n] : kClassNames)
    if (k == c) return n;
  return "?";
}

std::optional<AxiomClass> axiom_class_from(const std::string& name) {
  for (auto [k, n] : kClassNames)
    if (name == n) return k;
  return std::nullopt;
}

bool SystemProfile::allows(AxiomClass c) const {
  return std::find(axiomClasses.begin(), axiomClasses.end(), c) != axiomClasses.end();
}

SystemProfile system_profile(const std::string& name) {
  if (name == "Nc") return {name, {}, false};
  if (name == "NcEq") return {name, {AxiomClass::Rfl, AxiomClass::Sbst}, false};
  if (name == "NcEqStrict")
    return {name,
            {AxiomClass::Rfl, AxiomClass::Sbst, AxiomClass::StrictConst, AxiomClass::StrictFun,
             AxiomClass::StrictRel},
            false};
  if (name == "NcDownEq")
    return {name, {AxiomClass::Rfl, AxiomClass::Sbst, AxiomClass::Definedness}, true};
  throw error("unknown system: " + name);
}

// ---------- Axiom schema matching ----------

namespace {

// Peels the universal prefix; returns the matrix.
const Formula* strip_foralls(const Formula& f) {
  const Formula* m = &f;
  while (m->kind() == FormulaKind::Forall) m = &m->body();
  return m;
}

// exists y (y = t) with y not in t
std::optional<Term> as_definedness(const Formula& f) {
  if (f.kind() != FormulaKind::Exists) return std::nullopt;
  const Formula& body = f.body();
  if (body.kind() != FormulaKind::Equal) return std::nullopt;
  const Term& l = body.terms()[0];
  if (l.kind() != TermKind::Variable || l.name() != f.name()) return std::nullopt;
  const Term& t = body.terms()[1];
  std::set<std::string> vs;
  collect_vars(t, vs);
  if (vs.count(f.name())) return std::nullopt;
  return t;
}

void flatten_conj(const Formula& f, std::vector<const Formula*>& out) {
  if (f.kind() == FormulaKind::And) {
    flatten_conj(f.left(), out);
    flatten_conj(f.right(), out);
  } else {
    out.push_back(&f);
  }
}

bool definedness_list_matches(const Formula& f, const std::vector<Term>& args) {
  std::vector<const Formula*> leaves;
  flatten_conj(f, leaves);
  if (leaves.size() != args.size()) return false;
  for (size_t i = 0; i < args.size(); ++i) {
    auto t = as_definedness(*leaves[i]);
    if (!t || !(*t == args[i])) return false;
  }
  return true;
}

// Builds G from the two instances: positions where they differ must carry the
// pair (r, s) and become the substitution variable, outermost first.
std::optional<Term> generalize_term(const Term& a, const Term& b, const Term& r, const Term& s,
                                    const std::string& v) {
  if (a == b) return a;
  if (a == r && b == s) return Term::var(v);
  if (a.kind() == TermKind::Apply && b.kind() == TermKind::Apply && a.name() == b.name() &&
      a.args().size() == b.args().size()) {
    std::vector<Term> args;
    for (size_t i = 0; i < a.args().size(); ++i) {
      auto t = generalize_term(a.args()[i], b.args()[i], r, s, v);
      if (!t) return std::nullopt;
      args.push_back(std::move(*t));
    }
    return Term::apply(a.name(), std::move(args));
  }
  return std::nullopt;
}

std::optional<Formula> generalize(const Formula& a, const Formula& b, const Term& r,
                                  const Term& s, const std::string& v) {
  if (a.kind() != b.kind()) return std::nullopt;
  switch (a.kind()) {
    case FormulaKind::Falsum:
      return a;
    case FormulaKind::Atom:
    case FormulaKind::Equal: {
      if (a.kind() == FormulaKind::Atom &&
          (a.name() != b.name() || a.terms().size() != b.terms().size()))
        return std::nullopt;
      std::vector<Term> ts;
      for (size_t i = 0; i < a.terms().size(); ++i) {
        auto t = generalize_term(a.terms()[i], b.terms()[i], r, s, v);
        if (!t) return std::nullopt;
        ts.push_back(std::move(*t));
      }
      return a.kind() == FormulaKind::Equal ? Formula::equal(ts[0], ts[1])
                                            : Formula::atom(a.name(), std::move(ts));
    }
    case FormulaKind::Not: {
      auto c = generalize(a.child(), b.child(), r, s, v);
      if (!c) return std::nullopt;
      return Formula::negation(std::move(*c));
    }
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies: {
      auto l = generalize(a.left(), b.left(), r, s, v);
      auto rr = generalize(a.right(), b.right(), r, s, v);
      if (!l || !rr) return std::nullopt;
      if (a.kind() == FormulaKind::And) return Formula::conj(std::move(*l), std::move(*rr));
      if (a.kind() == FormulaKind::Or) return Formula::disj(std::move(*l), std::move(*rr));
      return Formula::implies(std::move(*l), std::move(*rr));
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      if (a.name() != b.name()) return std::nullopt;
      auto c = generalize(a.body(), b.body(), r, s, v);
      if (!c) return std::nullopt;
      return a.kind() == FormulaKind::Forall ? Formula::forall(a.name(), std::move(*c))
                                             : Formula::exists(a.name(), std::move(*c));
    }
  }
  return std::nullopt;
}

bool closed(const Formula& f) { return free_vars_ordered(f).empty(); }

bool has_params(const Formula& f) {
  std::set<std::string> ps;
  collect_params(f, ps);
  return !ps.empty();
}

void all_names(const Formula& f, std::set<std::string>& out) {
  switch (f.kind()) {
    case FormulaKind::Falsum:
      return;
    case FormulaKind::Atom:
    case FormulaKind::Equal:
      for (const Term& t : f.terms()) collect_vars(t, out);
      return;
    case FormulaKind::Not:
      all_names(f.child(), out);
      return;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      all_names(f.left(), out);
      all_names(f.right(), out);
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      out.insert(f.name());
      all_names(f.body(), out);
      return;
  }
}

bool match_sbst(const Formula& f, const std::optional<std::string>& substVar) {
  if (!closed(f) || has_params(f)) return false;
  const Formula& m = *strip_foralls(f);
  if (m.kind() != FormulaKind::Implies || m.left().kind() != FormulaKind::Equal ||
      m.right().kind() != FormulaKind::Implies)
    return false;
  const Term& r = m.left().terms()[0];
  const Term& s = m.left().terms()[1];
  const Formula& g1 = m.right().left();
  const Formula& g2 = m.right().right();
  std::string v;
  if (substVar) {
    v = *substVar;
  } else {
    std::set<std::string> used;
    all_names(m, used);
    v = "w";
    while (used.count(v)) v += "'";
  }
  auto g = generalize(g1, g2, r, s, v);
  if (!g) return false;
  return substitute(*g, {{v, r}}) == g1 && substitute(*g, {{v, s}}) == g2;
}

}  // namespace

bool match_axiom(const Formula& f, AxiomClass cls, const Signature& sig,
                 const std::optional<std::string>& substVar) {
  switch (cls) {
    case AxiomClass::Rfl: {
      if (!closed(f) || has_params(f)) return false;
      const Formula& m = *strip_foralls(f);
      return m.kind() == FormulaKind::Equal && m.terms()[0] == m.terms()[1];
    }
    case AxiomClass::Sbst:
      return match_sbst(f, substVar);
    case AxiomClass::Definedness: {
      if (!closed(f)) return false;
      return as_definedness(*strip_foralls(f)).has_value();
    }
    case AxiomClass::StrictConst: {
      if (!closed(f)) return false;
      auto t = as_definedness(*strip_foralls(f));
      if (!t || t->kind() != TermKind::Apply || !t->args().empty()) return false;
      return sig.function_arity(t->name()) == 0;
    }
    case AxiomClass::StrictFun: {
      if (!closed(f)) return false;
      const Formula& m = *strip_foralls(f);
      if (m.kind() != FormulaKind::Implies) return false;
      auto t = as_definedness(m.left());
      if (!t || t->kind() != TermKind::Apply || t->args().empty()) return false;
      if (!sig.function_arity(t->name())) return false;
      return definedness_list_matches(m.right(), t->args());
    }
    case AxiomClass::StrictRel: {
      if (!closed(f)) return false;
      const Formula& m = *strip_foralls(f);
      if (m.kind() != FormulaKind::Implies || m.left().kind() != FormulaKind::Atom) return false;
      if (!sig.relation_arity(m.left().name())) return false;
      return definedness_list_matches(m.right(), m.left().terms());
    }
  }
  return false;
}

// ---------- Checking ----------

namespace {

struct Eigen {
  bool isParam;
  std::string name;

  static Eigen from(const std::string& raw) {
    if (!raw.empty() && raw[0] == '@') return {true, raw.substr(1)};
    return {false, raw};
  }
  Term term() const { return isParam ? Term::param(name) : Term::var(name); }
  bool occurs_in(const Formula& f) const {
    return isParam ? contains_param(f, name) : has_free_var(f, name);
  }
};

// Reads off the instantiating term by aligning the two formulas; the result
// is verified by substitution so binder renaming cannot slip through.
bool align_term(const Term& g, const Term& c, const std::string& x, bool shadowed,
                std::optional<Term>& t) {
  if (!shadowed && g.kind() == TermKind::Variable && g.name() == x) {
    if (t && !(*t == c)) return false;
    t = c;
    return true;
  }
  if (g.kind() != c.kind() || g.name() != c.name()) return false;
  if (g.kind() == TermKind::Apply) {
    if (g.args().size() != c.args().size()) return false;
    for (size_t i = 0; i < g.args().size(); ++i)
      if (!align_term(g.args()[i], c.args()[i], x, shadowed, t)) return false;
  }
  return true;
}

bool align(const Formula& g, const Formula& c, const std::string& x, bool shadowed,
           std::optional<Term>& t) {
  if (g.kind() != c.kind()) return false;
  switch (g.kind()) {
    case FormulaKind::Falsum:
      return true;
    case FormulaKind::Atom:
    case FormulaKind::Equal: {
      if (g.kind() == FormulaKind::Atom && g.name() != c.name()) return false;
      if (g.terms().size() != c.terms().size()) return false;
      for (size_t i = 0; i < g.terms().size(); ++i)
        if (!align_term(g.terms()[i], c.terms()[i], x, shadowed, t)) return false;
      return true;
    }
    case FormulaKind::Not:
      return align(g.child(), c.child(), x, shadowed, t);
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return align(g.left(), c.left(), x, shadowed, t) &&
             align(g.right(), c.right(), x, shadowed, t);
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      if (g.name() != c.name()) return false;
      return align(g.body(), c.body(), x, shadowed || g.name() == x, t);
  }
  return false;
}

std::optional<Term> infer_instance(const Formula& g, const std::string& x, const Formula& c) {
  std::optional<Term> t;
  if (!align(g, c, x, false, t)) return std::nullopt;
  Term out = t ? *t : Term::var(x);
  if (!(substitute(g, {{x, out}}) == c)) return std::nullopt;
  return out;
}

// Points into the proof tree, which outlives the check.
struct OpenAssumption {
  std::optional<std::string> label;
  const Formula* formula;
  std::string path;
};

struct Checker {
  const SystemProfile& sys;
  const Signature& sig;
  CheckReport report;

  using Opens = std::vector<OpenAssumption>;

  void violate(const std::string& path, std::string msg) {
    report.ok = false;
    report.violations.push_back({path, std::move(msg)});
  }

  void discharge(Opens& open, const std::optional<std::string>& label, const Formula& required,
                 const std::string& path) {
    if (!label) return;
    Opens keep;
    for (OpenAssumption& oa : open) {
      if (oa.label == label) {
        if (!(*oa.formula == required))
          violate(path, "discharged assumption at " + oa.path + " is " +
                            print_formula(*oa.formula) + ", expected " + print_formula(required));
      } else {
        keep.push_back(std::move(oa));
      }
    }
    open = std::move(keep);
  }

  void instantiation_guard(const Term& t, const std::string& path) {
    if (!sys.unrestrictedInstantiation && t.kind() == TermKind::Apply)
      violate(path, "restricted instantiation: " + print_term(t) +
                        " is not a variable or parameter");
  }

  Opens check(const ProofNode& n, const std::string& path) {
    std::vector<Opens> kid;
    for (size_t i = 0; i < n.children.size(); ++i)
      kid.push_back(check(n.children[i], path.empty() ? std::to_string(i)
                                                      : path + "." + std::to_string(i)));
    Opens merged;
    for (const Opens& k : kid)
      for (const OpenAssumption& oa : k) merged.push_back(oa);

    auto arity = [&](size_t want) {
      if (n.children.size() == want) return true;
      violate(path, to_string(n.rule) + " expects " + std::to_string(want) + " premise(s)");
      return false;
    };
    const Formula& C = n.conclusion;
    auto child = [&](size_t i) -> const Formula& { return n.children[i].conclusion; };

    switch (n.rule) {
      case RuleKind::Assume:
        if (!n.children.empty()) violate(path, "assume takes no premises");
        return {{n.label, &C, path}};

      case RuleKind::AndI:
        if (!arity(2)) break;
        if (C.kind() != FormulaKind::And || !(C.left() == child(0)) || !(C.right() == child(1)))
          violate(path, "conclusion is not the conjunction of the premises");
        break;

      case RuleKind::AndEL:
        if (!arity(1)) break;
        if (child(0).kind() != FormulaKind::And || !(C == child(0).left()))
          violate(path, "conclusion is not the left conjunct of the premise");
        break;

      case RuleKind::AndER:
        if (!arity(1)) break;
        if (child(0).kind() != FormulaKind::And || !(C == child(0).right()))
          violate(path, "conclusion is not the right conjunct of the premise");
        break;

      case RuleKind::OrIL:
        if (!arity(1)) break;
        if (C.kind() != FormulaKind::Or || !(C.left() == child(0)))
          violate(path, "premise is not the left disjunct of the conclusion");
        break;

      case RuleKind::OrIR:
        if (!arity(1)) break;
        if (C.kind() != FormulaKind::Or || !(C.right() == child(0)))
          violate(path, "premise is not the right disjunct of the conclusion");
        break;

      case RuleKind::OrE: {
        if (!arity(3)) break;
        if (child(0).kind() != FormulaKind::Or) {
          violate(path, "major premise is not a disjunction");
          break;
        }
        if (!(child(1) == C) || !(child(2) == C))
          violate(path, "case conclusions must match the conclusion");
        std::optional<std::string> l0, l1;
        if (n.dischargeLabels.size() > 0) l0 = n.dischargeLabels[0];
        if (n.dischargeLabels.size() > 1) l1 = n.dischargeLabels[1];
        discharge(kid[1], l0, child(0).left(), path);
        discharge(kid[2], l1, child(0).right(), path);
        merged.clear();
        for (const Opens& k : kid)
          for (const OpenAssumption& oa : k) merged.push_back(oa);
        break;
      }

      case RuleKind::ImpI: {
        if (!arity(1)) break;
        if (C.kind() != FormulaKind::Implies || !(C.right() == child(0))) {
          violate(path, "conclusion is not an implication ending in the premise");
          break;
        }
        discharge(merged, n.label, C.left(), path);
        break;
      }

      case RuleKind::ImpE:
        if (!arity(2)) break;
        if (child(0).kind() != FormulaKind::Implies || !(child(0).left() == child(1)) ||
            !(C == child(0).right()))
          violate(path, "premises do not fit modus ponens");
        break;

      case RuleKind::NotI: {
        if (!arity(1)) break;
        if (C.kind() != FormulaKind::Not || child(0).kind() != FormulaKind::Falsum) {
          violate(path, "negation introduction needs falsum from the negated assumption");
          break;
        }
        discharge(merged, n.label, C.child(), path);
        break;
      }

      case RuleKind::NotE:
        if (!arity(2)) break;
        if (child(0).kind() != FormulaKind::Not || !(child(0).child() == child(1)) ||
            C.kind() != FormulaKind::Falsum)
          violate(path, "premises do not contradict");
        break;

      case RuleKind::FalsumE:
        if (!arity(1)) break;
        if (child(0).kind() != FormulaKind::Falsum) violate(path, "premise is not falsum");
        break;

      case RuleKind::Raa: {
        if (!arity(1)) break;
        if (child(0).kind() != FormulaKind::Falsum) {
          violate(path, "premise is not falsum");
          break;
        }
        discharge(merged, n.label, Formula::negation(C), path);
        break;
      }

      case RuleKind::ForallI: {
        if (!arity(1)) break;
        if (C.kind() != FormulaKind::Forall) {
          violate(path, "conclusion is not universal");
          break;
        }
        if (!n.properParam) {
          violate(path, "missing proper parameter");
          break;
        }
        Eigen e = Eigen::from(*n.properParam);
        if (!(substitute(C.body(), {{C.name(), e.term()}}) == child(0)))
          violate(path, "premise is not the proper instance of the conclusion");
        for (const OpenAssumption& oa : merged)
          if (e.occurs_in(*oa.formula))
            violate(path, "proper parameter occurs in open assumption " +
                              print_formula(*oa.formula));
        if (e.occurs_in(C)) violate(path, "proper parameter occurs in the conclusion");
        break;
      }

      case RuleKind::ForallE: {
        if (!arity(1)) break;
        if (child(0).kind() != FormulaKind::Forall) {
          violate(path, "premise is not universal");
          break;
        }
        auto t = infer_instance(child(0).body(), child(0).name(), C);
        if (!t) {
          violate(path, "conclusion is not an instance of the premise");
          break;
        }
        instantiation_guard(*t, path);
        break;
      }

      case RuleKind::ExistsI: {
        if (!arity(1)) break;
        if (C.kind() != FormulaKind::Exists) {
          violate(path, "conclusion is not existential");
          break;
        }
        auto t = infer_instance(C.body(), C.name(), child(0));
        if (!t) {
          violate(path, "premise is not an instance of the conclusion");
          break;
        }
        instantiation_guard(*t, path);
        break;
      }

      case RuleKind::ExistsE: {
        if (!arity(2)) break;
        if (child(0).kind() != FormulaKind::Exists) {
          violate(path, "major premise is not existential");
          break;
        }
        if (!(child(1) == C)) violate(path, "conclusion must match the case premise");
        if (!n.properParam) {
          violate(path, "missing proper parameter");
          break;
        }
        Eigen e = Eigen::from(*n.properParam);
        Formula witness = substitute(child(0).body(), {{child(0).name(), e.term()}});
        discharge(kid[1], n.label, witness, path);
        merged.clear();
        for (const Opens& k : kid)
          for (const OpenAssumption& oa : k) merged.push_back(oa);
        if (e.occurs_in(child(0)))
          violate(path, "proper parameter occurs in the existential premise");
        if (e.occurs_in(C)) violate(path, "proper parameter occurs in the conclusion");
        for (const OpenAssumption& oa : merged)
          if (e.occurs_in(*oa.formula))
            violate(path, "proper parameter occurs in open assumption " +
                              print_formula(*oa.formula));
        break;
      }

      case RuleKind::Axiom: {
        if (!n.children.empty()) violate(path, "axiom takes no premises");
        if (!n.axiomClass) {
          violate(path, "axiom node missing its class");
          break;
        }
        if (!sys.allows(*n.axiomClass))
          violate(path, to_string(*n.axiomClass) + " axioms are not available in " + sys.name);
        else if (!match_axiom(C, *n.axiomClass, sig, n.substVar))
          violate(path, "formula is not an instance of " + to_string(*n.axiomClass));
        break;
      }
    }
    return merged;
  }
};

}  // namespace

CheckReport check_deduction(const ProofNode& d, const SystemProfile& sys, const Signature& sig) {
  Checker ck{sys, sig, {}};
  auto open = ck.check(d, "");
  std::set<std::string> seen;
  for (const OpenAssumption& oa : open)
    if (seen.insert(print_formula(*oa.formula)).second)
      ck.report.openAssumptions.push_back(*oa.formula);
  return ck.report;
}

CheckReport check_sequent(const ProofNode& d, const std::vector<Formula>& premises,
                          const Formula& goal, const SystemProfile& sys, const Signature& sig) {
  CheckReport rep = check_deduction(d, sys, sig);
  if (!(d.conclusion == goal)) {
    rep.ok = false;
    rep.violations.push_back({"", "conclusion is " + print_formula(d.conclusion) +
                                      ", expected " + print_formula(goal)});
  }
  for (const Formula& oa : rep.openAssumptions) {
    bool found = false;
    for (const Formula& p : premises)
      if (p == oa) found = true;
    if (!found) {
      rep.ok = false;
      rep.violations.push_back({"", "open assumption not among the premises: " +
                                        print_formula(oa)});
    }
  }
  return rep;
}

// ---------- Equality axiom enumeration ----------

namespace {

Term params_as_vars(const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
      return t;
    case TermKind::Parameter:
      return Term::var(t.name());
    case TermKind::Apply: {
      std::vector<Term> args;
      for (const Term& a : t.args()) args.push_back(params_as_vars(a));
      return Term::apply(t.name(), std::move(args));
    }
  }
  return t;
}

Formula imp_chain(std::vector<Formula> antecedents, Formula consequent) {
  Formula out = std::move(consequent);
  for (auto it = antecedents.rbegin(); it != antecedents.rend(); ++it)
    out = Formula::implies(std::move(*it), std::move(out));
  return out;
}

// Renames variables to x1, x2, ... in first-occurrence order, then closes, so
// alpha-variant instances print identically.
Formula canonical_closure(const Formula& matrix) {
  std::vector<std::string> order = free_vars_ordered(matrix);
  std::map<std::string, Term> ren;
  for (size_t i = 0; i < order.size(); ++i)
    ren.emplace(order[i], Term::var("x" + std::to_string(i + 1)));
  return universal_closure(substitute(matrix, ren));
}

// Variable-built terms of depth <= round over a supply of round+1 variables.
std::vector<Term> schema_terms(const Signature& sig, int round) {
  Signature vsig = sig;
  vsig.params.clear();
  for (int i = 0; i <= round; ++i) vsig.params.push_back("x" + std::to_string(i + 1));
  std::vector<Term> out;
  for (const Term& t : enumerate_pure_terms(vsig, round)) out.push_back(params_as_vars(t));
  return out;
}

void each_index_tuple(size_t n, size_t base,
                      const std::function<void(const std::vector<size_t>&)>& fn) {
  if (base == 0 || n == 0) return;
  std::vector<size_t> idx(n, 0);
  while (true) {
    fn(idx);
    size_t k = n;
    while (k > 0) {
      if (++idx[k - 1] < base) break;
      idx[k - 1] = 0;
      --k;
    }
    if (k == 0) break;
  }
}

}  // namespace

std::vector<Formula> equality_axioms_up_to(const Signature& sig, int round) {
  std::vector<Formula> out;
  std::set<std::string> seen;
  auto add = [&](const Formula& matrix) {
    Formula f = canonical_closure(matrix);
    if (seen.insert(print_formula(f)).second) out.push_back(std::move(f));
  };
  for (int r = 0; r <= round; ++r) {
    std::vector<Term> ts = schema_terms(sig, r);
    for (const Term& t : ts) add(Formula::equal(t, t));
    for (const Term& a : ts)
      for (const Term& b : ts)
        add(Formula::implies(Formula::equal(a, b), Formula::equal(b, a)));
    for (const Term& a : ts)
      for (const Term& b : ts)
        for (const Term& c : ts)
          add(Formula::implies(Formula::equal(a, b),
                               Formula::implies(Formula::equal(b, c), Formula::equal(a, c))));
    for (const auto& [fn, ar] : sig.functions) {
      if (ar < 1) continue;
      each_index_tuple(2 * ar, ts.size(), [&](const std::vector<size_t>& idx) {
        std::vector<Formula> eqs;
        std::vector<Term> lhs, rhs;
        for (int k = 0; k < ar; ++k) {
          lhs.push_back(ts[idx[k]]);
          rhs.push_back(ts[idx[ar + k]]);
          eqs.push_back(Formula::equal(ts[idx[k]], ts[idx[ar + k]]));
        }
        add(imp_chain(std::move(eqs),
                      Formula::equal(Term::apply(fn, lhs), Term::apply(fn, rhs))));
      });
    }
    for (const auto& [rl, ar] : sig.relations) {
      each_index_tuple(2 * ar, ts.size(), [&](const std::vector<size_t>& idx) {
        std::vector<Formula> eqs;
        std::vector<Term> lhs, rhs;
        for (int k = 0; k < ar; ++k) {
          lhs.push_back(ts[idx[k]]);
          rhs.push_back(ts[idx[ar + k]]);
          eqs.push_back(Formula::equal(ts[idx[k]], ts[idx[ar + k]]));
        }
        eqs.push_back(Formula::atom(rl, lhs));
        add(imp_chain(std::move(eqs), Formula::atom(rl, rhs)));
      });
    }
  }
  return out;
}

std::optional<Formula> instantiate_equality_axiom(const Signature& sig, size_t index) {
  size_t prev = 0;
  for (int round = 0;; ++round) {
    if (round > 6) throw error("equality axiom enumeration exceeds supported bounds");
    std::vector<Formula> axs = equality_axioms_up_to(sig, round);
    if (index < axs.size()) return axs[index];
    if (round > 0 && axs.size() == prev) return std::nullopt;  // saturated: no functions
    prev = axs.size();
  }
}

std::vector<Formula> strictness_axioms(const Signature& sig) {
  std::vector<Formula> out;
  auto args_of = [](int ar) {
    std::vector<Term> args;
    for (int i = 1; i <= ar; ++i) args.push_back(Term::var("x" + std::to_string(i)));
    return args;
  };
  auto all_defined = [](const std::vector<Term>& args) {
    Formula f = definedness(args[0]);
    for (size_t i = 1; i < args.size(); ++i)
      f = Formula::conj(std::move(f), definedness(args[i]));
    return f;
  };
  auto closed = [](int ar, Formula f) {
    for (int i = ar; i >= 1; --i) f = Formula::forall("x" + std::to_string(i), std::move(f));
    return f;
  };
  for (const auto& [fn, ar] : sig.functions) {
    if (fn == "undef") continue;
    if (ar == 0) {
      out.push_back(definedness(Term::apply(fn, {})));
      continue;
    }
    std::vector<Term> args = args_of(ar);
    Formula body = Formula::implies(definedness(Term::apply(fn, args)), all_defined(args));
    out.push_back(closed(ar, std::move(body)));
  }
  for (const auto& [rl, ar] : sig.relations) {
    std::vector<Term> args = args_of(ar);
    Formula body = Formula::implies(Formula::atom(rl, args), all_defined(args));
    out.push_back(closed(ar, std::move(body)));
  }
  return out;
}

// ---------- Proof files ----------

namespace {

struct Line {
  int level;
  std::string head;
  std::string formula;
  int number;
};

ProofNode node_from(const Line& ln, const Signature& sig) {
  std::istringstream hs(ln.head);
  std::string tok;
  if (!(hs >> tok)) throw error("proof line " + std::to_string(ln.number) + ": missing rule");
  auto rule = rule_kind_from(tok);
  if (!rule)
    throw error("proof line " + std::to_string(ln.number) + ": unknown rule " + tok);
  ProofNode n;
  n.rule = *rule;
  bool first = true;
  while (hs >> tok) {
    if (first && n.rule == RuleKind::Axiom && tok.find('=') == std::string::npos) {
      auto cls = axiom_class_from(tok);
      if (!cls)
        throw error("proof line " + std::to_string(ln.number) + ": unknown axiom class " + tok);
      n.axiomClass = *cls;
      first = false;
      continue;
    }
    first = false;
    if (tok.rfind("label=", 0) == 0) {
      std::string val = tok.substr(6);
      if (n.rule == RuleKind::OrE) {
        size_t at = 0;
        while (at != std::string::npos) {
          size_t comma = val.find(',', at);
          n.dischargeLabels.push_back(val.substr(at, comma - at));
          at = comma == std::string::npos ? comma : comma + 1;
        }
      } else {
        n.label = val;
      }
    } else if (tok.rfind("param=", 0) == 0) {
      n.properParam = tok.substr(6);
    } else if (tok.rfind("v:=", 0) == 0) {
      n.substVar = tok.substr(3);
    } else {
      throw error("proof line " + std::to_string(ln.number) + ": unknown option " + tok);
    }
  }
  try {
    n.conclusion = parse_formula(ln.formula, sig);
  } catch (const error& e) {
    throw error("proof line " + std::to_string(ln.number) + ": " + e.what());
  }
  return n;
}

}  // namespace

ProofNode parse_proof(const std::string& text, const Signature& sig) {
  std::istringstream in(text);
  std::string raw;
  std::vector<Line> lines;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    while (!raw.empty() && (raw.back() == ' ' || raw.back() == '\t' || raw.back() == '\r'))
      raw.pop_back();
    if (raw.empty()) continue;
    size_t indent = raw.find_first_not_of(' ');
    if (indent % 2 != 0)
      throw error("proof line " + std::to_string(number) + ": indentation must be two spaces per level");
    size_t sep = raw.find(" : ", indent);
    if (sep == std::string::npos)
      throw error("proof line " + std::to_string(number) + ": missing ' : ' before the formula");
    lines.push_back({static_cast<int>(indent / 2), raw.substr(indent, sep - indent),
                     raw.substr(sep + 3), number});
  }
  if (lines.empty()) throw error("empty proof");
  if (lines[0].level != 0) throw error("proof line 1: the root must not be indented");

  ProofNode root = node_from(lines[0], sig);
  std::vector<ProofNode*> stack{&root};
  for (size_t i = 1; i < lines.size(); ++i) {
    const Line& ln = lines[i];
    if (ln.level < 1 || ln.level > static_cast<int>(stack.size()))
      throw error("proof line " + std::to_string(ln.number) +
                  (ln.level < 1 ? ": a second root is not allowed" : ": indentation skips a level"));
    stack.resize(ln.level);
    ProofNode* parent = stack.back();
    parent->children.push_back(node_from(ln, sig));
    stack.push_back(&parent->children.back());
  }
  return root;
}

namespace {

void print_node(const ProofNode& n, int level, std::ostringstream& out) {
  out << std::string(2 * level, ' ') << to_string(n.rule);
  if (n.axiomClass) out << " " << to_string(*n.axiomClass);
  if (n.label) out << " label=" << *n.label;
  if (!n.dischargeLabels.empty()) {
    out << " label=";
    for (size_t i = 0; i < n.dischargeLabels.size(); ++i)
      out << (i ? "," : "") << n.dischargeLabels[i];
  }
  if (n.properParam) out << " param=" << *n.properParam;
  if (n.substVar) out << " v:=" << *n.substVar;
  out << " : " << print_formula(n.conclusion) << "\n";
  for (const ProofNode& c : n.children) print_node(c, level + 1, out);
}

}  // namespace

std::string print_proof(const ProofNode& d) {
  std::ostringstream out;
  print_node(d, 0, out);
  return out.str();
}

}  // namespace plt

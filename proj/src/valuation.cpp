#include "plt/valuation.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "lexer.hpp"

namespace plt {

std::string to_string(Tri t) {
  switch (t) {
    case Tri::False: return "f";
    case Tri::True: return "t";
    case Tri::Indeterminate: return "indeterminate";
  }
  return {};
}

// ---------- Pattern matching ----------

namespace {

using Binds = std::map<std::string, long>;

long lin_value(const LinExpr& e, const Binds& b) {
  if (!e.var) return e.c;
  return b.at(*e.var) + e.c;
}

bool match_pattern(const PatternTerm& p, const Term& t, Binds& binds);

bool try_tower(const PatternTerm& p, const Term& t, Binds& binds) {
  // Count the maximal nest of p.name applications.
  std::vector<const Term*> spine{&t};
  const Term* cur = &t;
  while (cur->kind() == TermKind::Apply && cur->name() == p.name && cur->args().size() == 1) {
    cur = &cur->args()[0];
    spine.push_back(cur);
  }
  long maxk = static_cast<long>(spine.size()) - 1;
  for (long k = maxk; k >= 0; --k) {
    Binds trial = binds;
    if (p.exp.var) {
      long n = k - p.exp.c;
      if (n < 0) continue;
      auto it = trial.find(*p.exp.var);
      if (it != trial.end()) {
        if (it->second != n) continue;
      } else {
        trial.emplace(*p.exp.var, n);
      }
    } else {
      if (p.exp.c != k) continue;
    }
    if (match_pattern(p.args[0], *spine[k], trial)) {
      binds = std::move(trial);
      return true;
    }
  }
  return false;
}

bool match_pattern(const PatternTerm& p, const Term& t, Binds& binds) {
  switch (p.kind) {
    case PatternTerm::Kind::Param:
      return t.kind() == TermKind::Parameter && t.name() == p.name;
    case PatternTerm::Kind::Apply: {
      if (t.kind() != TermKind::Apply || t.name() != p.name ||
          t.args().size() != p.args.size())
        return false;
      Binds trial = binds;
      for (size_t i = 0; i < p.args.size(); ++i)
        if (!match_pattern(p.args[i], t.args()[i], trial)) return false;
      binds = std::move(trial);
      return true;
    }
    case PatternTerm::Kind::Tower:
      return try_tower(p, t, binds);
  }
  return false;
}

bool guard_holds(const IndexGuard& g, const Binds& b) {
  long l = lin_value(g.lhs, b), r = lin_value(g.rhs, b);
  switch (g.op) {
    case IndexGuard::Op::Eq: return l == r;
    case IndexGuard::Op::Ne: return l != r;
    case IndexGuard::Op::Ge: return l >= r;
    case IndexGuard::Op::Le: return l <= r;
    case IndexGuard::Op::Gt: return l > r;
    case IndexGuard::Op::Lt: return l < r;
  }
  return false;
}

}  // namespace

bool match_rule(const PatternRule& rule, const Formula& atom) {
  const bool eq = atom.kind() == FormulaKind::Equal;
  if (rule.isEquality != eq) return false;
  if (!eq && (atom.kind() != FormulaKind::Atom || atom.name() != rule.rel)) return false;
  if (atom.terms().size() != rule.args.size()) return false;
  Binds binds;
  for (size_t i = 0; i < rule.args.size(); ++i)
    if (!match_pattern(rule.args[i], atom.terms()[i], binds)) return false;
  for (const IndexGuard& g : rule.guards)
    if (!guard_holds(g, binds)) return false;
  return true;
}

// ---------- TvValuation ----------

void TvValuation::validate() const {
  sig.validate();
  if (domain.empty()) throw error("valuation domain is empty");
  std::set<std::string> seen;
  for (const std::string& d : domain) {
    if (!sig.is_param(d)) throw error("domain parameter not declared in signature: " + d);
    if (!seen.insert(d).second) throw error("duplicate domain parameter: " + d);
  }
  for (const auto& [a, val] : atoms) {
    (void)val;
    if (a.kind() != FormulaKind::Atom && a.kind() != FormulaKind::Equal)
      throw error("valuation entry is not an atom: " + print_formula(a));
    if (!is_pure(a)) throw error("valuation entry is not pure: " + print_formula(a));
  }
}

bool TvValuation::atom_value(const Formula& atom) const {
  if (atom.kind() != FormulaKind::Atom && atom.kind() != FormulaKind::Equal)
    throw error("atom_value called on a non-atom: " + print_formula(atom));
  if (computed) return computed(atom);
  for (const auto& [a, val] : atoms)
    if (a == atom) return val;
  for (const PatternRule& r : rules)
    if (match_rule(r, atom)) return r.value;
  return defaultValue;
}

// ---------- Evaluation ----------

namespace {

Tri tri_not(Tri a) {
  if (a == Tri::Indeterminate) return a;
  return a == Tri::True ? Tri::False : Tri::True;
}

Tri tri_and(Tri a, Tri b) {
  if (a == Tri::False || b == Tri::False) return Tri::False;
  if (a == Tri::Indeterminate || b == Tri::Indeterminate) return Tri::Indeterminate;
  return Tri::True;
}

Tri tri_or(Tri a, Tri b) {
  if (a == Tri::True || b == Tri::True) return Tri::True;
  if (a == Tri::Indeterminate || b == Tri::Indeterminate) return Tri::Indeterminate;
  return Tri::False;
}

struct Evaluator {
  const TvValuation& v;
  EvalMode mode;
  std::vector<Term> universe;
  bool complete = true;  // the universe exhausts all pure terms
  std::map<std::string, bool> atomCache;

  Evaluator(const TvValuation& val, EvalMode m) : v(val), mode(m) {
    if (mode.kind == EvalMode::Kind::ParamQuant) {
      for (const std::string& p : v.domain) universe.push_back(Term::param(p));
    } else {
      universe = enumerate_pure_terms(v.sig.with_params(v.domain), mode.depth);
      for (const auto& [n, a] : v.sig.functions)
        if (a >= 1) complete = false;
    }
  }

  bool atom(const Formula& f) {
    std::string key = print_formula(f);
    auto it = atomCache.find(key);
    if (it != atomCache.end()) return it->second;
    bool val = v.atom_value(f);
    atomCache.emplace(std::move(key), val);
    return val;
  }

  Tri ev(const Formula& f) {
    switch (f.kind()) {
      case FormulaKind::Falsum:
        return Tri::False;
      case FormulaKind::Atom:
      case FormulaKind::Equal:
        return tri_of(atom(f));
      case FormulaKind::Not:
        return tri_not(ev(f.child()));
      case FormulaKind::And:
        return tri_and(ev(f.left()), ev(f.right()));
      case FormulaKind::Or:
        return tri_or(ev(f.left()), ev(f.right()));
      case FormulaKind::Implies:
        return tri_or(tri_not(ev(f.left())), ev(f.right()));
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        const bool uni = f.kind() == FormulaKind::Forall;
        bool sawInd = false;
        for (const Term& u : universe) {
          Tri r = ev(substitute(f.body(), {{f.name(), u}}));
          if (uni && r == Tri::False) return Tri::False;
          if (!uni && r == Tri::True) return Tri::True;
          if (r == Tri::Indeterminate) sawInd = true;
        }
        if (!complete || sawInd) return Tri::Indeterminate;
        return uni ? Tri::True : Tri::False;
      }
    }
    return Tri::Indeterminate;
  }
};

}  // namespace

Tri eval(const TvValuation& v, const Formula& f, EvalMode mode) {
  if (!is_pure(f)) throw error("eval requires a pure formula: " + print_formula(f));
  std::set<std::string> ps;
  collect_params(f, ps);
  for (const std::string& p : ps)
    if (std::find(v.domain.begin(), v.domain.end(), p) == v.domain.end())
      throw error("parameter outside the valuation domain: @" + p);
  return Evaluator(v, mode).ev(f);
}

// ---------- Denotation ----------

std::optional<std::string> representative(const TvValuation& v, const Term& t) {
  for (const std::string& a : v.domain)
    if (v.atom_value(Formula::equal(Term::param(a), t))) return a;
  return std::nullopt;
}

bool is_denoting(const TvValuation& v, const Term& t) {
  return representative(v, t).has_value();
}

// ---------- Checks ----------

namespace {

constexpr size_t kMaxViolations = 50;

void note_violation(ValuationCheckReport& rep, std::string msg) {
  rep.pass = false;
  if (rep.violations.size() < kMaxViolations) rep.violations.push_back(std::move(msg));
}

}  // namespace

ValuationCheckReport check_equality_valuation(const TvValuation& v, int depth) {
  ValuationCheckReport rep;
  rep.depth = depth;
  std::vector<Term> terms = enumerate_pure_terms(v.sig.with_params(v.domain), depth);
  auto holds = [&](const Term& a, const Term& b) {
    return v.atom_value(Formula::equal(a, b));
  };
  for (const Term& t : terms)
    if (!holds(t, t)) note_violation(rep, "Rfl fails at " + print_term(t) + " = " + print_term(t));
  std::vector<std::pair<size_t, size_t>> truePairs;
  for (size_t i = 0; i < terms.size(); ++i)
    for (size_t j = 0; j < terms.size(); ++j)
      if (holds(terms[i], terms[j])) truePairs.emplace_back(i, j);
  for (auto [i, j] : truePairs)
    if (!holds(terms[j], terms[i]))
      note_violation(rep, "Symm fails at " + print_term(terms[i]) + " = " + print_term(terms[j]));
  for (auto [i, j] : truePairs)
    for (size_t k = 0; k < terms.size(); ++k)
      if (holds(terms[j], terms[k]) && !holds(terms[i], terms[k]))
        note_violation(rep, "Trans fails at " + print_term(terms[i]) + " = " +
                                print_term(terms[j]) + ", " + print_term(terms[j]) + " = " +
                                print_term(terms[k]));
  // Componentwise-equal argument tuples, built from the true equality pairs.
  auto each_tuple = [&](int n, auto&& fn) {
    std::vector<size_t> idx(n, 0);
    if (truePairs.empty()) return;
    while (true) {
      std::vector<Term> lhs, rhs;
      for (int k = 0; k < n; ++k) {
        lhs.push_back(terms[truePairs[idx[k]].first]);
        rhs.push_back(terms[truePairs[idx[k]].second]);
      }
      fn(lhs, rhs);
      int k = n - 1;
      while (k >= 0 && ++idx[k] == truePairs.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  };
  for (const auto& [fn, ar] : v.sig.functions) {
    if (ar < 1) continue;
    each_tuple(ar, [&](const std::vector<Term>& lhs, const std::vector<Term>& rhs) {
      Term l = Term::apply(fn, lhs), r = Term::apply(fn, rhs);
      if (!holds(l, r))
        note_violation(rep, "Cng for " + fn + " fails at " + print_term(l) + " = " + print_term(r));
    });
  }
  for (const auto& [rl, ar] : v.sig.relations) {
    each_tuple(ar, [&](const std::vector<Term>& lhs, const std::vector<Term>& rhs) {
      if (v.atom_value(Formula::atom(rl, lhs)) && !v.atom_value(Formula::atom(rl, rhs)))
        note_violation(rep, "Cng for " + rl + " fails at " +
                                print_formula(Formula::atom(rl, lhs)) + " vs " +
                                print_formula(Formula::atom(rl, rhs)));
    });
  }
  return rep;
}

ValuationCheckReport check_strict(const TvValuation& v, int depth) {
  ValuationCheckReport rep;
  rep.depth = depth;
  std::vector<Term> terms = enumerate_pure_terms(v.sig.with_params(v.domain), depth);
  auto each_tuple = [&](int n, auto&& fn) {
    if (n == 0) return;
    std::vector<size_t> idx(n, 0);
    while (true) {
      std::vector<Term> tup;
      for (int k = 0; k < n; ++k) tup.push_back(terms[idx[k]]);
      fn(tup);
      int k = n - 1;
      while (k >= 0 && ++idx[k] == terms.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  };
  for (const auto& [fn, ar] : v.sig.functions) {
    if (ar == 0) {
      if (fn == "undef") continue;  // the undefined symbol is exempt by design
      if (!is_denoting(v, Term::apply(fn, {})))
        note_violation(rep, "axiom 1 at " + fn);
    } else {
      each_tuple(ar, [&](const std::vector<Term>& tup) {
        Term t = Term::apply(fn, tup);
        if (!is_denoting(v, t)) return;
        for (const Term& a : tup)
          if (!is_denoting(v, a))
            note_violation(rep, "axiom 2 at " + print_term(t));
      });
    }
  }
  for (const auto& [rl, ar] : v.sig.relations) {
    each_tuple(ar, [&](const std::vector<Term>& tup) {
      if (!v.atom_value(Formula::atom(rl, tup))) return;
      for (const Term& a : tup)
        if (!is_denoting(v, a))
          note_violation(rep, "axiom 3 at " + print_formula(Formula::atom(rl, tup)));
    });
  }
  return rep;
}

bool is_totally_denoting(const TvValuation& v) {
  for (const auto& [fn, ar] : v.sig.functions) {
    if (ar == 0) {
      if (!is_denoting(v, Term::apply(fn, {}))) return false;
      continue;
    }
    std::vector<size_t> idx(ar, 0);
    while (true) {
      std::vector<Term> tup;
      for (int k = 0; k < ar; ++k) tup.push_back(Term::param(v.domain[idx[k]]));
      if (!is_denoting(v, Term::apply(fn, tup))) return false;
      int k = ar - 1;
      while (k >= 0 && ++idx[k] == v.domain.size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  return true;
}

// ---------- File format ----------

namespace {

using lexdetail::Tok;
using lexdetail::Token;

class LineParser {
 public:
  LineParser(const std::string& line, const Signature& sig, int lineno)
      : sig_(sig), toks_(lexdetail::lex(line)), lineno_(lineno) {}

  const Token& peek() const { return toks_[at_]; }
  Token take() { return toks_[at_++]; }
  bool accept(Tok k) {
    if (peek().kind == k) {
      ++at_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw error("valuation line " + std::to_string(lineno_) + ": " + msg);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }

  // Pattern terms; numeric towers stay as fixed-height towers here.
  PatternTerm pattern_term() {
    PatternTerm p;
    if (peek().kind == Tok::Param) {
      p.kind = PatternTerm::Kind::Param;
      p.name = take().text;
      return p;
    }
    if (peek().kind != Tok::Ident) fail("expected a term pattern");
    std::string name = take().text;
    if (peek().kind == Tok::Caret) {
      take();
      auto fa = sig_.function_arity(name);
      if (!fa || *fa != 1) fail("tower base must be a declared unary function: " + name);
      p.kind = PatternTerm::Kind::Tower;
      p.name = name;
      p.exp = lin_expr();
      expect(Tok::LParen, "'('");
      p.args.push_back(pattern_term());
      expect(Tok::RParen, "')'");
      return p;
    }
    auto fa = sig_.function_arity(name);
    if (!fa) fail("undeclared function in pattern: " + name);
    p.kind = PatternTerm::Kind::Apply;
    p.name = name;
    if (accept(Tok::LParen)) {
      p.args.push_back(pattern_term());
      while (accept(Tok::Comma)) p.args.push_back(pattern_term());
      expect(Tok::RParen, "')'");
    }
    if ((int)p.args.size() != *fa)
      fail("function " + name + " expects " + std::to_string(*fa) + " arguments");
    return p;
  }

  LinExpr lin_expr() {
    LinExpr e;
    if (peek().kind == Tok::Number) {
      e.c = std::stol(take().text);
      return e;
    }
    if (peek().kind != Tok::Ident) fail("expected an index expression");
    e.var = take().text;
    if (accept(Tok::Plus)) {
      if (peek().kind != Tok::Number) fail("expected a number after '+'");
      e.c = std::stol(take().text);
    }
    return e;
  }

  bool value_token() {
    if (peek().kind != Tok::Ident || (peek().text != "t" && peek().text != "f"))
      fail("expected value t or f");
    return take().text == "t";
  }

  std::vector<IndexGuard> guards() {
    std::vector<IndexGuard> out;
    if (peek().kind == Tok::End) return out;
    if (peek().kind != Tok::Ident || peek().text != "if") fail("expected 'if' or end of line");
    take();
    while (true) {
      IndexGuard g;
      g.lhs = lin_expr();
      switch (peek().kind) {
        case Tok::Equals: g.op = IndexGuard::Op::Eq; break;
        case Tok::Neq: g.op = IndexGuard::Op::Ne; break;
        case Tok::Ge: g.op = IndexGuard::Op::Ge; break;
        case Tok::Le: g.op = IndexGuard::Op::Le; break;
        case Tok::Gt: g.op = IndexGuard::Op::Gt; break;
        case Tok::Lt: g.op = IndexGuard::Op::Lt; break;
        default: fail("expected a comparison operator");
      }
      take();
      g.rhs = lin_expr();
      out.push_back(std::move(g));
      if (!accept(Tok::Comma)) break;
    }
    expect(Tok::End, "end of line");
    return out;
  }

  // rel(args) = value [if ...]   |   term = term : value [if ...]
  PatternRule rule_body() {
    PatternRule r;
    if (peek().kind == Tok::Ident && sig_.relation_arity(peek().text)) {
      r.rel = take().text;
      expect(Tok::LParen, "'('");
      r.args.push_back(pattern_term());
      while (accept(Tok::Comma)) r.args.push_back(pattern_term());
      expect(Tok::RParen, "')'");
      if ((int)r.args.size() != *sig_.relation_arity(r.rel))
        fail("relation " + r.rel + " arity mismatch");
      expect(Tok::Equals, "'='");
      r.value = value_token();
      r.guards = guards();
      return r;
    }
    r.isEquality = true;
    r.args.push_back(pattern_term());
    expect(Tok::Equals, "'='");
    r.args.push_back(pattern_term());
    expect(Tok::Colon, "':'");
    r.value = value_token();
    r.guards = guards();
    return r;
  }

 private:
  const Signature& sig_;
  std::vector<Token> toks_;
  size_t at_ = 0;
  int lineno_;
};

// Concrete instance of a pattern: no index variables anywhere.
std::optional<Term> pattern_to_term(const PatternTerm& p) {
  switch (p.kind) {
    case PatternTerm::Kind::Param:
      return Term::param(p.name);
    case PatternTerm::Kind::Apply: {
      std::vector<Term> args;
      for (const PatternTerm& a : p.args) {
        auto t = pattern_to_term(a);
        if (!t) return std::nullopt;
        args.push_back(*t);
      }
      return Term::apply(p.name, std::move(args));
    }
    case PatternTerm::Kind::Tower: {
      if (p.exp.var) return std::nullopt;
      auto base = pattern_to_term(p.args[0]);
      if (!base) return std::nullopt;
      Term t = *base;
      for (long i = 0; i < p.exp.c; ++i) t = Term::apply(p.name, {t});
      return t;
    }
  }
  return std::nullopt;
}

void collect_exp_vars(const PatternTerm& p, std::set<std::string>& out) {
  if (p.kind == PatternTerm::Kind::Tower && p.exp.var) out.insert(*p.exp.var);
  for (const PatternTerm& a : p.args) collect_exp_vars(a, out);
}

}  // namespace

TvValuation parse_valuation(const std::string& text, const Signature& sig) {
  TvValuation v;
  v.sig = sig;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool sawDefault = false;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream probe(line);
    std::string head;
    if (!(probe >> head)) continue;
    std::string rest = line.substr(line.find(head) + head.size());
    LineParser lp(rest, sig, lineno);
    if (head == "domain") {
      std::string p;
      while (probe >> p) v.domain.push_back(p);
    } else if (head == "default") {
      if (sawDefault) throw error("valuation line " + std::to_string(lineno) + ": duplicate default");
      sawDefault = true;
      v.defaultValue = lp.value_token();
    } else if (head == "atom") {
      PatternRule r = lp.rule_body();
      if (!r.guards.empty())
        throw error("valuation line " + std::to_string(lineno) + ": atom entries take no guards");
      std::vector<Term> ts;
      for (const PatternTerm& p : r.args) {
        auto t = pattern_to_term(p);
        if (!t)
          throw error("valuation line " + std::to_string(lineno) +
                      ": atom entries must be concrete");
        ts.push_back(*t);
      }
      Formula a = r.isEquality ? Formula::equal(ts[0], ts[1]) : Formula::atom(r.rel, ts);
      v.atoms.emplace_back(std::move(a), r.value);
    } else if (head == "rule") {
      PatternRule r = lp.rule_body();
      std::set<std::string> patVars;
      for (const PatternTerm& p : r.args) collect_exp_vars(p, patVars);
      for (const IndexGuard& g : r.guards)
        for (const LinExpr* e : {&g.lhs, &g.rhs})
          if (e->var && !patVars.count(*e->var))
            throw error("valuation line " + std::to_string(lineno) +
                        ": guard variable not bound by the pattern: " + *e->var);
      v.rules.push_back(std::move(r));
    } else {
      throw error("valuation line " + std::to_string(lineno) + ": unknown directive " + head);
    }
  }
  v.validate();
  return v;
}

namespace {

std::string print_lin(const LinExpr& e) {
  if (!e.var) return std::to_string(e.c);
  if (e.c == 0) return *e.var;
  return *e.var + "+" + std::to_string(e.c);
}

std::string print_pattern(const PatternTerm& p) {
  switch (p.kind) {
    case PatternTerm::Kind::Param:
      return "@" + p.name;
    case PatternTerm::Kind::Apply: {
      if (p.args.empty()) return p.name;
      std::string s = p.name + "(";
      for (size_t i = 0; i < p.args.size(); ++i) {
        if (i) s += ", ";
        s += print_pattern(p.args[i]);
      }
      return s + ")";
    }
    case PatternTerm::Kind::Tower:
      return p.name + "^" + print_lin(p.exp) + "(" + print_pattern(p.args[0]) + ")";
  }
  return {};
}

const char* guard_op(IndexGuard::Op op) {
  switch (op) {
    case IndexGuard::Op::Eq: return "=";
    case IndexGuard::Op::Ne: return "!=";
    case IndexGuard::Op::Ge: return ">=";
    case IndexGuard::Op::Le: return "<=";
    case IndexGuard::Op::Gt: return ">";
    case IndexGuard::Op::Lt: return "<";
  }
  return "=";
}

}  // namespace

std::string print_valuation(const TvValuation& v) {
  if (v.computed)
    throw error("cannot print a computed valuation" + (v.note.empty() ? "" : " (" + v.note + ")"));
  std::ostringstream out;
  out << "domain";
  for (const std::string& d : v.domain) out << " " << d;
  out << "\n";
  out << "default " << (v.defaultValue ? "t" : "f") << "\n";
  for (const auto& [a, val] : v.atoms) {
    if (a.kind() == FormulaKind::Equal) {
      out << "atom " << print_term(a.terms()[0]) << " = " << print_term(a.terms()[1]) << " : "
          << (val ? "t" : "f") << "\n";
    } else {
      out << "atom " << print_formula(a) << " = " << (val ? "t" : "f") << "\n";
    }
  }
  for (const PatternRule& r : v.rules) {
    out << "rule ";
    if (r.isEquality)
      out << print_pattern(r.args[0]) << " = " << print_pattern(r.args[1]) << " : "
          << (r.value ? "t" : "f");
    else {
      out << r.rel << "(";
      for (size_t i = 0; i < r.args.size(); ++i) {
        if (i) out << ", ";
        out << print_pattern(r.args[i]);
      }
      out << ") = " << (r.value ? "t" : "f");
    }
    for (size_t i = 0; i < r.guards.size(); ++i) {
      out << (i ? ", " : " if ") << print_lin(r.guards[i].lhs) << " "
          << guard_op(r.guards[i].op) << " " << print_lin(r.guards[i].rhs);
    }
    out << "\n";
  }
  return out.str();
}

}  // namespace plt

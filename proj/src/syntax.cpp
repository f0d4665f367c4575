#include "plt/syntax.hpp"

#include <algorithm>
#include <sstream>

#include "lexer.hpp"

namespace plt {

// ---------- Terms ----------

Term Term::var(std::string name) {
  Term t;
  t.kind_ = TermKind::Variable;
  t.name_ = std::move(name);
  return t;
}

Term Term::param(std::string name) {
  Term t;
  t.kind_ = TermKind::Parameter;
  t.name_ = std::move(name);
  return t;
}

Term Term::apply(std::string fn, std::vector<Term> args) {
  Term t;
  t.kind_ = TermKind::Apply;
  t.name_ = std::move(fn);
  t.args_ = std::move(args);
  return t;
}

bool Term::operator==(const Term& o) const {
  return kind_ == o.kind_ && name_ == o.name_ && args_ == o.args_;
}

// ---------- Formulae ----------

Formula Formula::atom(std::string rel, std::vector<Term> args) {
  Formula f;
  f.kind_ = FormulaKind::Atom;
  f.name_ = std::move(rel);
  f.terms_ = std::move(args);
  return f;
}

Formula Formula::equal(Term lhs, Term rhs) {
  Formula f;
  f.kind_ = FormulaKind::Equal;
  f.terms_ = {std::move(lhs), std::move(rhs)};
  return f;
}

Formula Formula::falsum() {
  Formula f;
  f.kind_ = FormulaKind::Falsum;
  return f;
}

Formula Formula::negation(Formula c) {
  Formula f;
  f.kind_ = FormulaKind::Not;
  f.kids_ = {std::move(c)};
  return f;
}

Formula Formula::conj(Formula l, Formula r) {
  Formula f;
  f.kind_ = FormulaKind::And;
  f.kids_ = {std::move(l), std::move(r)};
  return f;
}

Formula Formula::disj(Formula l, Formula r) {
  Formula f;
  f.kind_ = FormulaKind::Or;
  f.kids_ = {std::move(l), std::move(r)};
  return f;
}

Formula Formula::implies(Formula l, Formula r) {
  Formula f;
  f.kind_ = FormulaKind::Implies;
  f.kids_ = {std::move(l), std::move(r)};
  return f;
}

Formula Formula::forall(std::string var, Formula body) {
  Formula f;
  f.kind_ = FormulaKind::Forall;
  f.name_ = std::move(var);
  f.kids_ = {std::move(body)};
  return f;
}

Formula Formula::exists(std::string var, Formula body) {
  Formula f;
  f.kind_ = FormulaKind::Exists;
  f.name_ = std::move(var);
  f.kids_ = {std::move(body)};
  return f;
}

bool Formula::operator==(const Formula& o) const {
  return kind_ == o.kind_ && name_ == o.name_ && terms_ == o.terms_ && kids_ == o.kids_;
}

// ---------- Signature ----------

static const char* kReserved[] = {"false", "forall", "exists", "undef"};

static bool is_reserved_word(const std::string& s) {
  for (const char* r : kReserved)
    if (s == r) return true;
  return false;
}

std::optional<int> Signature::function_arity(const std::string& name) const {
  for (const auto& [n, a] : functions)
    if (n == name) return a;
  return std::nullopt;
}

std::optional<int> Signature::relation_arity(const std::string& name) const {
  for (const auto& [n, a] : relations)
    if (n == name) return a;
  return std::nullopt;
}

bool Signature::is_param(const std::string& name) const {
  return std::find(params.begin(), params.end(), name) != params.end();
}

void Signature::validate() const {
  std::set<std::string> seen;
  auto claim = [&](const std::string& n, const char* what) {
    if (n == "=" || n == "false") throw error("reserved name declared: " + n);
    if (!seen.insert(n).second) throw error(std::string("duplicate name: ") + n);
    if (n.empty()) throw error(std::string("empty ") + what + " name");
  };
  for (const auto& [n, a] : functions) {
    claim(n, "function");
    if (n == "undef") {
      if (a != 0 || !hasUndef) throw error("undef is reserved as the 0-ary undefined symbol");
    } else if (is_reserved_word(n)) {
      throw error("reserved name declared: " + n);
    }
    if (a < 0) throw error("negative arity for " + n);
  }
  if (hasUndef && !function_arity("undef")) throw error("hasUndef set but undef not listed");
  for (const auto& [n, a] : relations) {
    claim(n, "relation");
    if (is_reserved_word(n)) throw error("reserved name declared: " + n);
    if (a < 1) throw error("relation arity must be >= 1: " + n);
  }
  for (const auto& n : params) {
    claim(n, "parameter");
    if (is_reserved_word(n)) throw error("reserved name declared: " + n);
  }
  if (params.empty()) throw error("signature must declare at least one parameter");
}

Signature Signature::with_undef() const {
  Signature s = *this;
  if (!s.hasUndef) {
    s.hasUndef = true;
    s.functions.emplace_back("undef", 0);
  }
  return s;
}

Signature Signature::with_function(const std::string& name, int arity) const {
  Signature s = *this;
  s.functions.emplace_back(name, arity);
  return s;
}

Signature Signature::with_params(std::vector<std::string> ps) const {
  Signature s = *this;
  s.params = std::move(ps);
  return s;
}

Signature parse_signature(const std::string& text) {
  Signature sig;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string head;
    if (!(ls >> head)) continue;
    auto fail = [&](const std::string& msg) {
      throw error("signature line " + std::to_string(lineno) + ": " + msg);
    };
    if (head == "fun" || head == "rel") {
      std::string decl;
      if (!(ls >> decl)) fail("expected name/arity");
      auto slash = decl.find('/');
      if (slash == std::string::npos) fail("expected name/arity, got " + decl);
      std::string name = decl.substr(0, slash);
      int arity = 0;
      try {
        arity = std::stoi(decl.substr(slash + 1));
      } catch (...) {
        fail("bad arity in " + decl);
      }
      if (head == "fun") {
        if (name == "undef") {
          if (arity != 0) fail("undef must have arity 0");
          sig = sig.with_undef();
        } else {
          sig.functions.emplace_back(name, arity);
        }
      } else {
        sig.relations.emplace_back(name, arity);
      }
      std::string extra;
      if (ls >> extra) fail("trailing input: " + extra);
    } else if (head == "params") {
      std::string p;
      bool any = false;
      while (ls >> p) {
        sig.params.push_back(p);
        any = true;
      }
      if (!any) fail("params line lists no names");
    } else {
      fail("unknown directive: " + head);
    }
  }
  try {
    sig.validate();
  } catch (const error& e) {
    throw error(std::string("signature: ") + e.what());
  }
  return sig;
}

std::string print_signature(const Signature& sig) {
  std::ostringstream out;
  for (const auto& [n, a] : sig.functions) out << "fun " << n << "/" << a << "\n";
  for (const auto& [n, a] : sig.relations) out << "rel " << n << "/" << a << "\n";
  if (!sig.params.empty()) {
    out << "params";
    for (const auto& p : sig.params) out << " " << p;
    out << "\n";
  }
  return out.str();
}

// ---------- Parser ----------

namespace {

using lexdetail::Tok;
using lexdetail::Token;
using lexdetail::lex;

class Parser {
 public:
  Parser(const std::string& text, const Signature& sig)
      : sig_(sig), toks_(lex(text)) {}

  Formula formula() {
    Formula f = parse_implies();
    expect(Tok::End, "end of input");
    return f;
  }

  Term term() {
    Term t = parse_term();
    expect(Tok::End, "end of input");
    return t;
  }

 private:
  const Signature& sig_;
  std::vector<Token> toks_;
  size_t at_ = 0;
  std::vector<std::string> scope_;

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
    throw error("parse error at offset " + std::to_string(peek().pos) + ": " + msg);
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) fail(std::string("expected ") + what);
  }
  bool in_scope(const std::string& v) const {
    return std::find(scope_.begin(), scope_.end(), v) != scope_.end();
  }

  Formula parse_implies() {
    Formula l = parse_or();
    if (accept(Tok::Arrow)) return Formula::implies(std::move(l), parse_implies());
    return l;
  }

  Formula parse_or() {
    Formula l = parse_and();
    while (accept(Tok::Pipe)) l = Formula::disj(std::move(l), parse_and());
    return l;
  }

  Formula parse_and() {
    Formula l = parse_unary();
    while (accept(Tok::Amp)) l = Formula::conj(std::move(l), parse_unary());
    return l;
  }

  Formula parse_unary() {
    if (accept(Tok::Tilde)) return Formula::negation(parse_unary());
    if (peek().kind == Tok::Ident && (peek().text == "forall" || peek().text == "exists")) {
      bool uni = take().text == "forall";
      if (peek().kind != Tok::Ident) fail("expected bound variable name");
      std::string v = take().text;
      if (is_reserved_word(v)) fail("reserved word used as variable: " + v);
      expect(Tok::Dot, "'.' after bound variable");
      scope_.push_back(v);
      Formula body = parse_implies();  // quantifier scope extends maximally
      scope_.pop_back();
      return uni ? Formula::forall(v, std::move(body)) : Formula::exists(v, std::move(body));
    }
    if (accept(Tok::LParen)) {
      Formula f = parse_implies();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (peek().kind == Tok::Ident && peek().text == "false") {
      take();
      return Formula::falsum();
    }
    return parse_atom_or_term_formula();
  }

  // term '=' term | term '!' | rel(args)
  Formula parse_atom_or_term_formula() {
    if (peek().kind == Tok::Param) return finish_term_formula(parse_term());
    if (peek().kind != Tok::Ident) fail("expected a formula");
    std::string name = peek().text;
    if (auto ra = sig_.relation_arity(name); ra && !in_scope(name)) {
      take();
      expect(Tok::LParen, "'(' after relation name");
      std::vector<Term> args = term_list();
      expect(Tok::RParen, "')'");
      if ((int)args.size() != *ra)
        fail("relation " + name + " expects " + std::to_string(*ra) + " arguments");
      if (peek().kind == Tok::Equals || peek().kind == Tok::Bang)
        fail("relation atom cannot be used as a term");
      return Formula::atom(name, std::move(args));
    }
    return finish_term_formula(parse_term());
  }

  Formula finish_term_formula(Term t) {
    if (accept(Tok::Equals)) return Formula::equal(std::move(t), parse_term());
    if (accept(Tok::Bang)) return definedness(t);
    fail("expected '=' or '!' after term");
  }

  std::vector<Term> term_list() {
    std::vector<Term> args;
    args.push_back(parse_term());
    while (accept(Tok::Comma)) args.push_back(parse_term());
    return args;
  }

  Term parse_term() {
    if (peek().kind == Tok::Param) return Term::param(take().text);
    if (peek().kind != Tok::Ident) fail("expected a term");
    std::string name = take().text;
    if (is_reserved_word(name) && name != "undef") fail("reserved word used as term: " + name);
    // f^n(base) with a numeric exponent is concrete sugar for n nested
    // applications of a unary function.
    if (peek().kind == Tok::Caret) {
      take();
      if (peek().kind != Tok::Number) fail("expected a numeric exponent after '^'");
      long n = std::stol(take().text);
      auto fa = sig_.function_arity(name);
      if (!fa || *fa != 1) fail("tower base must be a declared unary function: " + name);
      expect(Tok::LParen, "'(' after tower");
      Term base = parse_term();
      expect(Tok::RParen, "')'");
      for (long i = 0; i < n; ++i) base = Term::apply(name, {base});
      return base;
    }
    if (accept(Tok::LParen)) {
      std::vector<Term> args = term_list();
      expect(Tok::RParen, "')'");
      auto fa = sig_.function_arity(name);
      if (!fa) fail("undeclared function: " + name);
      if ((int)args.size() != *fa)
        fail("function " + name + " expects " + std::to_string(*fa) + " arguments");
      return Term::apply(name, std::move(args));
    }
    if (in_scope(name)) return Term::var(name);
    if (auto fa = sig_.function_arity(name)) {
      if (*fa != 0) fail("function " + name + " expects arguments");
      return Term::apply(name, {});
    }
    fail("undeclared symbol: " + name);
  }
};

}  // namespace

Term parse_term(const std::string& text, const Signature& sig) {
  return Parser(text, sig).term();
}

Formula parse_formula(const std::string& text, const Signature& sig) {
  return Parser(text, sig).formula();
}

// ---------- Printing ----------

std::string print_term(const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
      return t.name();
    case TermKind::Parameter:
      return "@" + t.name();
    case TermKind::Apply: {
      if (t.args().empty()) return t.name();
      std::string s = t.name() + "(";
      for (size_t i = 0; i < t.args().size(); ++i) {
        if (i) s += ", ";
        s += print_term(t.args()[i]);
      }
      return s + ")";
    }
  }
  return {};
}

namespace {

// Precedence: -> 10 (right assoc), | 20, & 30, ~ 40. A quantifier body always
// prints bare; the quantifier itself is parenthesized in any operator context
// so that its maximal scope survives reparsing.
void fmt(const Formula& f, int ctx, std::string& out) {
  auto paren = [&](int mine, auto&& inner) {
    bool p = ctx > mine;
    if (p) out += "(";
    inner();
    if (p) out += ")";
  };
  switch (f.kind()) {
    case FormulaKind::Falsum:
      out += "false";
      return;
    case FormulaKind::Equal:
      out += print_term(f.terms()[0]) + " = " + print_term(f.terms()[1]);
      return;
    case FormulaKind::Atom: {
      out += f.name() + "(";
      for (size_t i = 0; i < f.terms().size(); ++i) {
        if (i) out += ", ";
        out += print_term(f.terms()[i]);
      }
      out += ")";
      return;
    }
    case FormulaKind::Not:
      out += "~";
      fmt(f.child(), 40, out);
      return;
    case FormulaKind::And:
      paren(30, [&] {
        fmt(f.left(), 30, out);
        out += " & ";
        fmt(f.right(), 31, out);
      });
      return;
    case FormulaKind::Or:
      paren(20, [&] {
        fmt(f.left(), 20, out);
        out += " | ";
        fmt(f.right(), 21, out);
      });
      return;
    case FormulaKind::Implies:
      paren(10, [&] {
        fmt(f.left(), 11, out);
        out += " -> ";
        fmt(f.right(), 10, out);
      });
      return;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      paren(0, [&] {
        out += (f.kind() == FormulaKind::Forall ? "forall " : "exists ") + f.name() + ". ";
        fmt(f.body(), 0, out);
      });
      return;
  }
}

}  // namespace

std::string print_formula(const Formula& f) {
  std::string out;
  fmt(f, 0, out);
  return out;
}

// ---------- Occurrence helpers ----------

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind() == TermKind::Variable) out.insert(t.name());
  for (const Term& a : t.args()) collect_vars(a, out);
}

void collect_params(const Term& t, std::set<std::string>& out) {
  if (t.kind() == TermKind::Parameter) out.insert(t.name());
  for (const Term& a : t.args()) collect_params(a, out);
}

void collect_params(const Formula& f, std::set<std::string>& out) {
  for (const Term& t : f.terms()) collect_params(t, out);
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      collect_params(f.child(), out);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      collect_params(f.left(), out);
      collect_params(f.right(), out);
      break;
    default:
      break;
  }
}

namespace {

void free_vars_walk(const Formula& f, std::vector<std::string>& bound,
                    std::vector<std::string>& out, std::set<std::string>& seen) {
  auto term_walk = [&](const Term& t, auto&& self) -> void {
    if (t.kind() == TermKind::Variable) {
      if (std::find(bound.begin(), bound.end(), t.name()) == bound.end() &&
          seen.insert(t.name()).second)
        out.push_back(t.name());
    }
    for (const Term& a : t.args()) self(a, self);
  };
  for (const Term& t : f.terms()) term_walk(t, term_walk);
  switch (f.kind()) {
    case FormulaKind::Not:
      free_vars_walk(f.child(), bound, out, seen);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      free_vars_walk(f.left(), bound, out, seen);
      free_vars_walk(f.right(), bound, out, seen);
      break;
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      bound.push_back(f.name());
      free_vars_walk(f.body(), bound, out, seen);
      bound.pop_back();
      break;
    default:
      break;
  }
}

}  // namespace

std::vector<std::string> free_vars_ordered(const Formula& f) {
  std::vector<std::string> bound, out;
  std::set<std::string> seen;
  free_vars_walk(f, bound, out, seen);
  return out;
}

std::set<std::string> free_vars(const Formula& f) {
  auto v = free_vars_ordered(f);
  return std::set<std::string>(v.begin(), v.end());
}

bool contains_param(const Term& t, const std::string& name) {
  if (t.kind() == TermKind::Parameter && t.name() == name) return true;
  for (const Term& a : t.args())
    if (contains_param(a, name)) return true;
  return false;
}

bool contains_param(const Formula& f, const std::string& name) {
  std::set<std::string> ps;
  collect_params(f, ps);
  return ps.count(name) != 0;
}

bool has_free_var(const Formula& f, const std::string& name) {
  return free_vars(f).count(name) != 0;
}

bool is_pure(const Term& t) {
  std::set<std::string> vs;
  collect_vars(t, vs);
  return vs.empty();
}

bool is_pure(const Formula& f) { return free_vars(f).empty(); }

// ---------- Substitution ----------

Term substitute(const Term& t, const std::map<std::string, Term>& binding) {
  switch (t.kind()) {
    case TermKind::Variable: {
      auto it = binding.find(t.name());
      return it == binding.end() ? t : it->second;
    }
    case TermKind::Parameter:
      return t;
    case TermKind::Apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(substitute(a, binding));
      return Term::apply(t.name(), std::move(args));
    }
  }
  return t;
}

Formula substitute(const Formula& f, const std::map<std::string, Term>& binding) {
  switch (f.kind()) {
    case FormulaKind::Falsum:
      return f;
    case FormulaKind::Atom: {
      std::vector<Term> args;
      for (const Term& t : f.terms()) args.push_back(substitute(t, binding));
      return Formula::atom(f.name(), std::move(args));
    }
    case FormulaKind::Equal:
      return Formula::equal(substitute(f.terms()[0], binding), substitute(f.terms()[1], binding));
    case FormulaKind::Not:
      return Formula::negation(substitute(f.child(), binding));
    case FormulaKind::And:
      return Formula::conj(substitute(f.left(), binding), substitute(f.right(), binding));
    case FormulaKind::Or:
      return Formula::disj(substitute(f.left(), binding), substitute(f.right(), binding));
    case FormulaKind::Implies:
      return Formula::implies(substitute(f.left(), binding), substitute(f.right(), binding));
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::string y = f.name();
      std::map<std::string, Term> inner(binding);
      inner.erase(y);
      // Restrict to variables actually free in the body.
      std::set<std::string> fv = free_vars(f.body());
      for (auto it = inner.begin(); it != inner.end();)
        it = fv.count(it->first) ? std::next(it) : inner.erase(it);
      if (inner.empty()) return f;
      bool capture = false;
      for (const auto& [x, r] : inner) {
        std::set<std::string> vs;
        collect_vars(r, vs);
        if (vs.count(y)) {
          capture = true;
          break;
        }
      }
      Formula body = f.body();
      if (capture) {
        std::string fresh = y;
        auto bad = [&](const std::string& cand) {
          if (cand != y && fv.count(cand)) return true;
          for (const auto& [x, r] : inner) {
            std::set<std::string> vs;
            collect_vars(r, vs);
            if (vs.count(cand)) return true;
          }
          return false;
        };
        do {
          fresh += "'";
        } while (bad(fresh));
        body = substitute(body, {{y, Term::var(fresh)}});
        y = fresh;
      }
      body = substitute(body, inner);
      return f.kind() == FormulaKind::Forall ? Formula::forall(y, std::move(body))
                                            : Formula::exists(y, std::move(body));
    }
  }
  return f;
}

// ---------- Derived constructions ----------

Formula definedness(const Term& t) {
  std::set<std::string> vs;
  collect_vars(t, vs);
  std::string y = "y";
  while (vs.count(y)) y += "'";
  return Formula::exists(y, Formula::equal(Term::var(y), t));
}

Formula universal_closure(const Formula& f) {
  std::vector<std::string> fv = free_vars_ordered(f);
  Formula out = f;
  for (auto it = fv.rbegin(); it != fv.rend(); ++it) out = Formula::forall(*it, std::move(out));
  return out;
}

PurifyResult purify(const std::vector<Formula>& premises, const Formula& goal,
                    const Signature* sig) {
  std::vector<std::string> order;
  std::set<std::string> seen;
  for (const Formula& g : premises)
    for (const std::string& v : free_vars_ordered(g))
      if (seen.insert(v).second) order.push_back(v);
  for (const std::string& v : free_vars_ordered(goal))
    if (seen.insert(v).second) order.push_back(v);

  std::set<std::string> taken;
  for (const Formula& g : premises) collect_params(g, taken);
  collect_params(goal, taken);
  if (sig)
    for (const std::string& p : sig->params) taken.insert(p);

  PurifyResult res;
  std::map<std::string, Term> binding;
  int next = 0;
  for (const std::string& v : order) {
    std::string cand;
    do {
      cand = "v" + std::to_string(next++);
    } while (taken.count(cand));
    taken.insert(cand);
    res.theta.emplace_back(v, cand);
    binding.emplace(v, Term::param(cand));
  }
  for (const Formula& g : premises) res.premises.push_back(substitute(g, binding));
  res.goal = substitute(goal, binding);
  return res;
}

int term_depth(const Term& t) {
  int d = 0;
  for (const Term& a : t.args()) d = std::max(d, 1 + term_depth(a));
  return d;
}

std::vector<Term> enumerate_pure_terms(const Signature& sig, int depth) {
  if (depth < 0) throw error("enumerate_pure_terms: negative depth");
  std::vector<Term> pool;
  std::vector<int> poolDepth;
  for (const std::string& p : sig.params) {
    pool.push_back(Term::param(p));
    poolDepth.push_back(0);
  }
  for (const auto& [n, a] : sig.functions)
    if (a == 0) {
      pool.push_back(Term::apply(n, {}));
      poolDepth.push_back(0);
    }
  for (int level = 1; level <= depth; ++level) {
    size_t frozen = pool.size();  // args come from terms of depth < level
    for (const auto& [n, a] : sig.functions) {
      if (a < 1) continue;
      std::vector<size_t> idx(a, 0);
      while (true) {
        int maxd = 0;
        for (int k = 0; k < a; ++k) maxd = std::max(maxd, poolDepth[idx[k]]);
        if (maxd == level - 1) {
          std::vector<Term> args;
          for (int k = 0; k < a; ++k) args.push_back(pool[idx[k]]);
          pool.push_back(Term::apply(n, std::move(args)));
          poolDepth.push_back(level);
        }
        int k = a - 1;
        while (k >= 0 && ++idx[k] == frozen) idx[k--] = 0;
        if (k < 0) break;
      }
    }
  }
  return pool;
}

}  // namespace plt

#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace plt {

struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---------- Terms ----------

enum class TermKind { Variable, Parameter, Apply };

// Immutable value type. Variables are quantifiable; parameters (written @a)
// are free names that no quantifier ever binds.
class Term {
 public:
  static Term var(std::string name);
  static Term param(std::string name);
  static Term apply(std::string fn, std::vector<Term> args);

  TermKind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const std::vector<Term>& args() const { return args_; }

  bool operator==(const Term& o) const;
  bool operator!=(const Term& o) const { return !(*this == o); }

 private:
  TermKind kind_ = TermKind::Variable;
  std::string name_;
  std::vector<Term> args_;
};

// ---------- Formulae ----------

enum class FormulaKind { Atom, Equal, Falsum, Not, And, Or, Implies, Forall, Exists };

class Formula {
 public:
  static Formula atom(std::string rel, std::vector<Term> args);
  static Formula equal(Term lhs, Term rhs);
  static Formula falsum();
  static Formula negation(Formula f);
  static Formula conj(Formula l, Formula r);
  static Formula disj(Formula l, Formula r);
  static Formula implies(Formula l, Formula r);
  static Formula forall(std::string var, Formula body);
  static Formula exists(std::string var, Formula body);

  FormulaKind kind() const { return kind_; }
  // Relation name for Atom, bound variable for Forall/Exists.
  const std::string& name() const { return name_; }
  // Atom arguments, or {lhs, rhs} for Equal.
  const std::vector<Term>& terms() const { return terms_; }
  const Formula& left() const { return kids_[0]; }
  const Formula& right() const { return kids_[1]; }
  const Formula& child() const { return kids_[0]; }  // Not and quantifier body
  const Formula& body() const { return kids_[0]; }

  bool operator==(const Formula& o) const;
  bool operator!=(const Formula& o) const { return !(*this == o); }

 private:
  FormulaKind kind_ = FormulaKind::Falsum;
  std::string name_;
  std::vector<Term> terms_;
  std::vector<Formula> kids_;
};

// ---------- Signature ----------

// `=` and `false` are built in and never declared. The 0-ary symbol `undef`
// is reserved; declaring `fun undef/0` enables it and sets hasUndef.
struct Signature {
  std::vector<std::pair<std::string, int>> functions;  // declaration order
  std::vector<std::pair<std::string, int>> relations;  // declaration order, arity >= 1
  std::vector<std::string> params;                     // P0, ordered, non-empty once validated
  bool hasUndef = false;

  std::optional<int> function_arity(const std::string& name) const;
  std::optional<int> relation_arity(const std::string& name) const;
  bool is_param(const std::string& name) const;

  void validate() const;  // throws plt::error on duplicate/reserved names, bad arities

  Signature with_undef() const;
  Signature with_function(const std::string& name, int arity) const;
  Signature with_params(std::vector<std::string> ps) const;
};

Signature parse_signature(const std::string& text);
std::string print_signature(const Signature& sig);

// ---------- Parsing and printing ----------

// Bare identifiers resolve to a bound variable when one is in scope, else to a
// declared 0-ary function; anything else is an error. `t!` is accepted as
// sugar for the definedness formula of t.
Term parse_term(const std::string& text, const Signature& sig);
Formula parse_formula(const std::string& text, const Signature& sig);

std::string print_term(const Term& t);
std::string print_formula(const Formula& f);

// ---------- Occurrence helpers ----------

void collect_vars(const Term& t, std::set<std::string>& out);
void collect_params(const Term& t, std::set<std::string>& out);
void collect_params(const Formula& f, std::set<std::string>& out);
std::set<std::string> free_vars(const Formula& f);
// First-occurrence order, premise list scanned before goal.
std::vector<std::string> free_vars_ordered(const Formula& f);
bool contains_param(const Term& t, const std::string& name);
bool contains_param(const Formula& f, const std::string& name);
bool has_free_var(const Formula& f, const std::string& name);

bool is_pure(const Term& t);     // no variable occurs
bool is_pure(const Formula& f);  // no free variable occurs

// ---------- Substitution ----------

// Simultaneous capture-avoiding substitution of terms for free variables.
// Bound variables are renamed by appending primes, and only when capture
// would otherwise occur.
Term substitute(const Term& t, const std::map<std::string, Term>& binding);
Formula substitute(const Formula& f, const std::map<std::string, Term>& binding);

// ---------- Derived constructions ----------

// exists y. y = t with y chosen not to occur in t ("y", then "y'", ...).
Formula definedness(const Term& t);

// Universal closure, free variables bound in first-occurrence order.
Formula universal_closure(const Formula& f);

struct PurifyResult {
  std::vector<Formula> premises;
  Formula goal = Formula::falsum();
  // var -> fresh parameter name, in first-occurrence order
  std::vector<std::pair<std::string, std::string>> theta;
};

// Replaces every free variable of the inputs by a distinct fresh parameter
// @v0, @v1, ... not occurring in the inputs (nor in sig's P0 when given).
PurifyResult purify(const std::vector<Formula>& premises, const Formula& goal,
                    const Signature* sig = nullptr);

// All pure terms of nesting depth <= depth, stratified by depth: parameters
// in P0 order, then 0-ary functions in declaration order, then for each level
// the compound terms in declaration order with argument tuples in
// lexicographic order of their enumeration indices. enumerate(s, d) is a
// prefix of enumerate(s, d+1).
std::vector<Term> enumerate_pure_terms(const Signature& sig, int depth);

int term_depth(const Term& t);

}  // namespace plt

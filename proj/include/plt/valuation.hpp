#pragma once

#include <functional>

#include "plt/syntax.hpp"

namespace plt {

enum class Tri { False, True, Indeterminate };

inline Tri tri_of(bool b) { return b ? Tri::True : Tri::False; }
std::string to_string(Tri t);  // "f", "t", "indeterminate"

struct EvalMode {
  enum class Kind { ParamQuant, PureTermQuant };
  Kind kind = Kind::ParamQuant;
  int depth = 0;
  static EvalMode param_quant() { return {Kind::ParamQuant, 0}; }
  static EvalMode pure_term_quant(int depth) { return {Kind::PureTermQuant, depth}; }
};

// Linear index expression: a variable plus a constant, or a bare constant.
struct LinExpr {
  std::optional<std::string> var;
  long c = 0;
};

struct IndexGuard {
  enum class Op { Eq, Ne, Ge, Le, Gt, Lt };
  LinExpr lhs;
  Op op = Op::Eq;
  LinExpr rhs;
};

// Pattern over pure terms. Parameters match themselves, applications match
// componentwise, and a tower h^E(base) matches a nest of h applications whose
// height satisfies E (maximal peel tried first, backtracking downward).
struct PatternTerm {
  enum class Kind { Param, Apply, Tower };
  Kind kind = Kind::Param;
  std::string name;               // parameter name or function symbol
  std::vector<PatternTerm> args;  // Apply arguments, or {base} for Tower
  LinExpr exp;                    // Tower height
};

struct PatternRule {
  bool isEquality = false;
  std::string rel;                // relation name when !isEquality
  std::vector<PatternTerm> args;  // atom arguments, or {lhs, rhs} for equality
  std::vector<IndexGuard> guards;
  bool value = false;
};

// A tv-valuation: a total assignment of t/f to the pure atoms over sig, with
// quantifiers relativized to the ordered parameter domain. Atom values come
// from the exact entries first, then the first matching rule, then the
// default. A computed body (projections onto a base valuation, lifts)
// overrides all three.
class TvValuation {
 public:
  Signature sig;
  std::vector<std::string> domain;              // non-empty, subset of sig.params
  std::vector<std::pair<Formula, bool>> atoms;  // exact entries, insertion order
  std::vector<PatternRule> rules;
  bool defaultValue = false;
  std::function<bool(const Formula&)> computed;
  std::string note;  // one-line description of a computed body

  void validate() const;
  bool atom_value(const Formula& atom) const;
};

bool match_rule(const PatternRule& rule, const Formula& atom);

// Two-valued under ParamQuant; under PureTermQuant(d) quantifiers range over
// the pure terms enumerated to depth d and the result is Indeterminate when
// that finite slice does not settle it.
Tri eval(const TvValuation& v, const Formula& f, EvalMode mode = EvalMode::param_quant());

// t denotes iff some domain parameter a has v(a = t) = t; the representative
// is the first such a in domain order.
bool is_denoting(const TvValuation& v, const Term& t);
std::optional<std::string> representative(const TvValuation& v, const Term& t);

struct ValuationCheckReport {
  bool pass = true;
  int depth = 0;
  std::vector<std::string> violations;
};

// Reflexivity, symmetry, transitivity and both congruence schemata over the
// pure terms enumerated to depth.
ValuationCheckReport check_equality_valuation(const TvValuation& v, int depth);

// Strictness: 1) constants denote (the reserved undef is exempt); 2) a
// denoting application has denoting arguments; 3) a true atom other than an
// equality has denoting arguments. Checked over terms enumerated to depth.
ValuationCheckReport check_strict(const TvValuation& v, int depth);

// Every constant denotes and every function applied to domain parameters
// denotes; this finite criterion is exact for quantifier relativization.
bool is_totally_denoting(const TvValuation& v);

TvValuation parse_valuation(const std::string& text, const Signature& sig);
std::string print_valuation(const TvValuation& v);  // rejects computed bodies

}  // namespace plt

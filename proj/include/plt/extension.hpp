#pragma once

#include "plt/valuation.hpp"

namespace plt {

// Total interpretation of one new function symbol: a finite exception table
// over argument tuples of pure base-language terms, backed by a constant
// fallback. A 0-ary symbol carries just its designated image in fallback.
struct FunctionInterpretation {
  std::string symbol;
  int arity = 0;
  std::vector<std::pair<std::vector<Term>, Term>> table;  // first match wins
  Term fallback = Term::param("");

  Term apply(const std::vector<Term>& args) const;
};

struct ExtensionContext {
  Signature base;
  Signature extended;  // base plus the new symbols
  std::vector<FunctionInterpretation> interpretations;

  const FunctionInterpretation* interpretation(const std::string& symbol) const;
  void validate() const;
};

// Projects a pure term of the extended language onto the base language: base
// symbols are kept, new functions are evaluated through their interpretations.
Term phi(const ExtensionContext& ctx, const Term& t);

// The projected valuation over the extended signature: base relations and
// equality read their arguments through phi, new relations are uniformly
// false. When v satisfies the equality axioms at congruenceDepth, every
// interpretation must be congruent at that depth.
TvValuation extend_valuation(const TvValuation& v, const ExtensionContext& ctx,
                             int congruenceDepth = 1);

// Componentwise =v-equal argument tuples must produce =v-equal results,
// over the pure terms enumerated to depth.
bool is_congruent(const TvValuation& v, const FunctionInterpretation& interp, int depth);

// A denoting result forces every argument to denote, over the same range.
bool is_strict_interp(const TvValuation& v, const FunctionInterpretation& interp, int depth);

struct LiftedValuation {
  TvValuation base;    // totally denoting, over the base language
  TvValuation lifted;  // over base plus the reserved constant undef
};

// Equality on terms that may mention undef: syntactic identity, base-true
// equalities between undef-free terms, or a shared head symbol agreeing
// componentwise.
bool eq_up(const LiftedValuation& lv, const Term& r, const Term& s);

LiftedValuation lift_undefined(const TvValuation& v);

struct ExtensionCheckReport {
  bool pass = true;
  int depth = 0;
  std::vector<std::string> mismatches;
};

// Brute-force audit of the projection equations: phi fixes base terms, and
// sample formulas instantiated at extended terms evaluate the same against
// the extension as their phi-images do against v. Passing `extended` overrides
// the valuation under audit (the default is extend_valuation(v, ctx)).
ExtensionCheckReport check_extension_property(const TvValuation& v, const ExtensionContext& ctx,
                                              const std::vector<Formula>& samples, int depth,
                                              const TvValuation* extended = nullptr);

ExtensionContext parse_extension(const std::string& text, const Signature& base);
std::string print_extension(const ExtensionContext& ctx);

}  // namespace plt

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "plt/extension.hpp"

namespace plt {

// A selection problem: a formula D whose free variables are among the
// distinct x1..xn and y, plus a fresh function symbol that is to pick, for
// each argument tuple, some y making D true.
struct SelectionSpec {
  Formula D = Formula::falsum();
  std::vector<std::string> xs;  // argument variables, in order
  std::string y = "y";
  std::string fname;

  void validate(const Signature& sig) const;
};

// first:  forall xs. (f(xs)! -> exists y. D)
// second: forall xs. (exists y. D -> exists y. (y = f(xs) & D))
std::pair<Formula, Formula> epsilon_axioms(const SelectionSpec& spec);

// D & forall y'. (D{y/y'} -> y' = y), with the primed variable chosen fresh
// for D, the argument variables and y.
Formula unique_existence(const SelectionSpec& spec);

// forall xs. forall y. ((f(xs) = y -> E) & (E -> f(xs) = y)) where E is
// unique_existence(spec).
Formula iota_axiom(const SelectionSpec& spec);

// forall xs. forall y. forall y'. (D & D{y/y'} -> y' = y)
Formula uniqueness(const SelectionSpec& spec);

struct EpsilonExtension {
  TvValuation base;  // v itself, or its undef lift
  bool baseLifted = false;
  FunctionInterpretation interp;
  ExtensionContext ctx;
  TvValuation extended;
};

// Interprets spec.fname by brute-force selection over the valuation: on a
// tuple of denoting terms the result is the first domain parameter (domain
// order) satisfying D at the tuple's representatives, and everywhere else a
// fixed non-denoting term t0. A totally denoting v is lifted first and t0 is
// undef; otherwise t0 is the first non-denoting term enumerated to depth,
// and it is an error when none exists there. Requires the equality axioms
// to pass at depth.
EpsilonExtension epsilon_extend(const TvValuation& v, const SelectionSpec& spec, int depth);

struct AxiomCheck {
  std::string name;
  bool pass = true;
  std::string witness;  // failing parameter instance, empty when passing
};

struct ConservativityReport {
  bool pass = false;  // all axiom checks pass
  bool baseLifted = false;
  std::string interpretation;  // extension-file text of the interpretation used
  std::vector<AxiomCheck> axioms;
  bool equalityPreserved = false;
  // set only when v is strict at depth and the interpretation is strict
  std::optional<bool> strictnessPreserved;
  int depth = 0;
};

// kind "epsilon": builds epsilon_extend(v, spec, depth) and evaluates both
// epsilon axioms on the extension. kind "iota": selects on unique_existence
// instead and evaluates iota_axiom of the original D. Axioms are checked one
// domain instance at a time so a failure names the parameters; the equality
// check is re-run on the extension either way. When extended is given the
// axioms are audited against it instead of the constructed extension.
ConservativityReport verify_conservativity(const TvValuation& v, const SelectionSpec& spec,
                                           const std::string& kind, int depth,
                                           const TvValuation* extended = nullptr);

}  // namespace plt

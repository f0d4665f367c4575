#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "plt/deduction.hpp"
#include "plt/valuation.hpp"

namespace plt {

struct SignedFormula {
  bool positive = true;
  Formula formula = Formula::falsum();

  bool operator==(const SignedFormula& o) const {
    return positive == o.positive && formula == o.formula;
  }
};

std::string print_signed(const SignedFormula& sf);  // "T <formula>" / "F <formula>"

// A universal-type formula (T.forall / F.exists) with the parameters it has
// already been instantiated at.
struct GammaEntry {
  size_t src = 0;  // index into Branch::formulas
  std::vector<std::string> done;
};

struct Branch {
  std::vector<SignedFormula> formulas;  // path sequence, root first
  std::vector<bool> processed;          // parallel; true once expanded or subsumed
  std::vector<std::string> usedParameters;  // first-use order
  std::vector<GammaEntry> gammaQueue;
  size_t equalityIndex = 0;  // next position in the equality pool
};

// Contains T.X and F.X for some X, or T.false.
bool branch_closed(const Branch& b);

// One expansion (or closure) in a certificate.  An expansion's options carry
// the formulas appended per resulting branch: one option for alpha/gamma/eq,
// two for beta, one per witness choice for delta (existing parameters first,
// a fresh one last).
struct CertNode {
  enum class Kind { Alpha, Beta, Gamma, Delta, Eq, Close };

  struct Option {
    std::optional<std::string> param;  // gamma instance / delta witness
    bool fresh = false;                // delta: last option only
    std::vector<SignedFormula> added;
    std::vector<CertNode> rest;  // exactly one continuation node
  };

  Kind kind = Kind::Close;
  size_t src = SIZE_MAX;             // expanded formula, as a path index
  std::optional<size_t> eqIndex;     // Eq: equality-axiom enumeration index
  std::vector<Option> options;
  size_t closeA = SIZE_MAX;          // Close: T side (or the T.false index)
  size_t closeB = SIZE_MAX;          // Close: F side; unset for T.false
};

struct Certificate {
  std::vector<SignedFormula> initial;  // T.premises then F.goal
  std::vector<CertNode> steps;         // exactly one root node
};

std::string print_certificate(const Certificate& c);

struct Budget {
  size_t maxSteps = 10000;
  size_t maxParams = 8;  // per branch
};

struct BudgetStats {
  size_t steps = 0;
  size_t branches = 1;
  size_t parameters = 0;  // max over branches
  size_t stuckBranches = 0;
};

struct DecideOutcome {
  enum class Kind { Proved, Countermodel, Exhausted };
  Kind kind = Kind::Exhausted;
  std::optional<Certificate> certificate;  // Proved
  std::optional<TvValuation> valuation;    // Countermodel
  BudgetStats stats;
};

// Systematic signed tableau for pure sequents under Nc or NcEq.  Gamma
// formulas are instantiated only at branch parameters (one fresh parameter is
// admitted when a branch has none); delta formulas split over every existing
// parameter as witness plus one fresh; under NcEq, closed equality axioms are
// appended between logical sweeps.  Countermodels are re-verified by
// evaluation (and the depth-1 equality check under NcEq) before being
// returned.
DecideOutcome decide(const std::vector<Formula>& premises, const Formula& goal,
                     const SystemProfile& sys, const Signature& sig, Budget budget = {});

// Valuation read off an open saturated branch: domain = usedParameters, atoms
// signed T map to t and F to f, default f; under NcEq reflexive equalities
// over the domain terms are forced to t.  Throws plt::error when the branch
// is closed or not saturated.
TvValuation extract_countermodel(const Branch& b, const SystemProfile& sys, const Signature& sig);

// Replays every expansion against the rule table: the initial block must be
// T.premises + F.goal, every step must follow from its source formula, delta
// options must end in a genuinely fresh witness, and every leaf must close.
// Returns false on any mismatch, never throws.
bool verify_certificate(const Certificate& c, const std::vector<Formula>& premises,
                        const Formula& goal, const SystemProfile& sys, const Signature& sig);

// The prefix of the equality-axiom enumeration used by decide: all axioms
// whose bodies stay within term depth 1, paired with their enumeration
// indices.  Bounded by a per-round cost estimate, so oversized signatures get
// a truncated (possibly empty) pool.
std::vector<std::pair<size_t, Formula>> tableau_equality_pool(const Signature& sig);

}  // namespace plt

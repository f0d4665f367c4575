#pragma once

#include <optional>
#include <string>
#include <vector>

#include "plt/syntax.hpp"

namespace plt {

enum class RuleKind {
  Assume,
  AndI,
  AndEL,
  AndER,
  OrIL,
  OrIR,
  OrE,
  ImpI,
  ImpE,
  NotI,
  NotE,
  FalsumE,
  Raa,
  ForallI,
  ForallE,
  ExistsI,
  ExistsE,
  Axiom,
};

std::string to_string(RuleKind k);
std::optional<RuleKind> rule_kind_from(const std::string& name);

enum class AxiomClass { Rfl, Sbst, Definedness, StrictConst, StrictFun, StrictRel };

std::string to_string(AxiomClass c);
std::optional<AxiomClass> axiom_class_from(const std::string& name);

// One node of a natural deduction.  Children are premises in rule order.
// `label` marks an assumption for discharge; `dischargeLabels` lists the
// labels closed here (positional for OrE: left case then right case).
// `properParam` is the eigenparameter of ForallI/ExistsE, written "@a" for a
// parameter or bare for a variable.  `substVar` pins the substitution
// variable of an Sbst axiom; `axiomClass` names the claimed schema.
struct ProofNode {
  RuleKind rule = RuleKind::Assume;
  Formula conclusion = Formula::falsum();
  std::vector<ProofNode> children;
  std::optional<std::string> label;
  std::vector<std::string> dischargeLabels;
  std::optional<std::string> properParam;
  std::optional<std::string> substVar;
  std::optional<AxiomClass> axiomClass;
};

struct SystemProfile {
  std::string name;
  std::vector<AxiomClass> axiomClasses;
  bool unrestrictedInstantiation = false;

  bool allows(AxiomClass c) const;
};

// Known systems: Nc, NcEq, NcEqStrict, NcDownEq.
SystemProfile system_profile(const std::string& name);

// True iff f is a closed instance of the schema.  Rfl and Sbst bodies must be
// parameter-free; Sbst matching discovers the substituted positions by
// comparing the two implicand instances outermost-first, and uses `substVar`
// as the substitution variable when designated.
bool match_axiom(const Formula& f, AxiomClass cls, const Signature& sig,
                 const std::optional<std::string>& substVar = std::nullopt);

struct Violation {
  std::string path;  // dotted child indices from the root, "" for the root
  std::string message;
};

struct CheckReport {
  bool ok = true;
  std::vector<Formula> openAssumptions;
  std::vector<Violation> violations;
};

// Validates every rule application and reports the undischarged assumptions.
// Malformed steps become violations, never exceptions.
CheckReport check_deduction(const ProofNode& d, const SystemProfile& sys, const Signature& sig);

// check_deduction plus: the conclusion must be `goal` and every open
// assumption must appear among `premises`.
CheckReport check_sequent(const ProofNode& d, const std::vector<Formula>& premises,
                          const Formula& goal, const SystemProfile& sys, const Signature& sig);

// Fair dedup'd enumeration of closed equality axioms over the signature:
// reflexivity, symmetry, transitivity and congruence instances with terms
// drawn from a growing variable supply at growing depth.  Round r uses
// variables x1..x{r+1} and terms of depth <= r; variables are renamed to
// first-occurrence order so alpha-variants collapse.
std::vector<Formula> equality_axioms_up_to(const Signature& sig, int round);

// Index into the concatenation of rounds.  nullopt once the enumeration is
// exhausted, which happens only for function-free signatures.
std::optional<Formula> instantiate_equality_axiom(const Signature& sig, size_t index);

// The strictness axioms of the signature in declaration order: definedness of
// each constant (undef exempt), then for each function and each relation the
// closed implication from definedness of an application (or atom truth) to
// definedness of every argument.  Each result matches its axiom class.
std::vector<Formula> strictness_axioms(const Signature& sig);

// Proof file format, one node per line, children indented two spaces:
//   <rule> [<class>] [label=L | label=L1,L2] [param=@a] [v:=x] : <formula>
ProofNode parse_proof(const std::string& text, const Signature& sig);
std::string print_proof(const ProofNode& d);

}  // namespace plt

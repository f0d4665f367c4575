// Command-line front end.  Every subcommand prints a short human-readable
// report followed by a machine-readable last line `RESULT: <token>`; exit
// codes are a function of that token (0 holds/ok/proved, 1 fails/countermodel,
// 2 exhausted/indeterminate) and 3 is reserved for input errors, which carry
// no RESULT line.

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "plt/conservativity.hpp"
#include "plt/tableaux.hpp"

namespace {

using namespace plt;

bool use_color() {
  const char* c = std::getenv("PLT_COLOR");
  return c && std::string(c) == "1";
}

std::string paint(const std::string& s, const char* code) {
  if (!use_color()) return s;
  return std::string("\033[") + code + "m" + s + "\033[0m";
}

std::string good(const std::string& s) { return paint(s, "1;32"); }
std::string bad(const std::string& s) { return paint(s, "1;31"); }
std::string meh(const std::string& s) { return paint(s, "1;33"); }

std::string verdict(bool ok) { return ok ? good("pass") : bad("fail"); }

int finish(const std::string& result) {
  std::cout << "RESULT: " << result << "\n";
  if (result == "t" || result == "proved" || result == "ok") return 0;
  if (result == "f" || result == "countermodel" || result == "fail") return 1;
  return 2;  // indeterminate, exhausted
}

std::string slurp_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// prefix parse errors with the originating file
template <class F>
auto in_file(const std::string& path, F&& fn) {
  try {
    return fn();
  } catch (const error& e) {
    throw error(path + ": " + e.what());
  }
}

Signature load_sig(const std::string& path) {
  std::string text = slurp_file(path);
  return in_file(path, [&] { return parse_signature(text); });
}

std::string trimmed(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Valuation files may declare domain parameters beyond the signature's (decide
// prints countermodels over fresh parameters); they are appended so the
// printed file round-trips through eval and verify-valuation.
TvValuation load_valuation(const std::string& path, const Signature& sig) {
  std::string text = slurp_file(path);
  Signature working = sig;
  std::istringstream lines(text);
  for (std::string line; std::getline(lines, line);) {
    std::string t = trimmed(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.rfind("domain", 0) == 0) {
      std::vector<std::string> ps = sig.params;
      std::istringstream names(t.substr(6));
      for (std::string name; names >> name;)
        if (std::find(ps.begin(), ps.end(), name) == ps.end()) ps.push_back(name);
      if (ps.size() != sig.params.size()) working = sig.with_params(std::move(ps));
    }
    break;  // only the leading directive can be a domain line
  }
  return in_file(path, [&] { return parse_valuation(text, working); });
}

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trimmed(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trimmed(cur));
  return out;
}

struct Sequent {
  std::vector<Formula> premises;
  Formula goal = Formula::falsum();
};

Sequent parse_sequent(const std::string& text, const Signature& sig) {
  size_t pos = text.find("|-");
  if (pos == std::string::npos) throw error("sequent needs '|-': " + text);
  Sequent seq;
  for (const std::string& part : split_on(text.substr(0, pos), ';'))
    if (!part.empty()) seq.premises.push_back(parse_formula(part, sig));
  std::string right = trimmed(text.substr(pos + 2));
  if (right.empty()) throw error("sequent needs a goal after '|-'");
  seq.goal = parse_formula(right, sig);
  return seq;
}

SystemProfile profile_from(const std::string& name) {
  if (name == "nc") return system_profile("Nc");
  if (name == "nceq") return system_profile("NcEq");
  if (name == "nceqs") return system_profile("NcEqStrict");
  if (name == "ncdowneq") return system_profile("NcDownEq");
  throw error("unknown system: " + name + " (want nc, nceq, nceqs or ncdowneq)");
}

// --vars "x,y": the last name is the selected variable, the rest are the
// arguments; the formula text may use them free and is parsed by closing
// over them.
SelectionSpec selection_from(const std::string& dtext, const std::string& varsCsv,
                             const std::string& fname, const Signature& sig) {
  std::vector<std::string> vars = split_on(varsCsv, ',');
  if (vars.size() == 1 && vars[0].empty()) vars.clear();
  if (vars.empty()) throw error("--vars needs at least the selected variable");
  SelectionSpec spec;
  spec.y = vars.back();
  spec.xs.assign(vars.begin(), vars.end() - 1);
  spec.fname = fname;
  std::string closedText;
  for (const std::string& v : vars) {
    if (v.empty()) throw error("--vars has an empty name");
    closedText += "forall " + v + ". ";
  }
  closedText += "(" + dtext + ")";
  Formula f = parse_formula(closedText, sig);
  for (size_t i = 0; i < vars.size(); ++i) f = f.body();
  spec.D = f;
  spec.validate(sig);
  return spec;
}

void print_check(const std::string& name, const ValuationCheckReport& rep, bool& allOk) {
  std::cout << name << ": " << verdict(rep.pass) << "\n";
  for (const std::string& v : rep.violations) std::cout << "  " << v << "\n";
  allOk = allOk && rep.pass;
}

// ---------- subcommands ----------

struct Options {
  std::string sig, val, ext, proof, formula, term, sequentText, varsCsv, fname;
  std::string mode = "param", system, kind;
  int depth = 2;
  int count = 10;
  size_t maxSteps = 10000;
  size_t maxParams = 8;
};

int run_parse(const Options& o) {
  Signature sig = load_sig(o.sig);
  bool any = false;
  if (!o.formula.empty()) {
    Formula f = in_file("<formula>", [&] { return parse_formula(o.formula, sig); });
    std::cout << "formula: " << print_formula(f) << "\n";
    any = true;
  }
  if (!o.term.empty()) {
    Term t = in_file("<term>", [&] { return parse_term(o.term, sig); });
    std::cout << "term: " << print_term(t) << "\n";
    any = true;
  }
  if (!o.val.empty()) {
    TvValuation v = load_valuation(o.val, sig);
    std::cout << print_valuation(v);
    any = true;
  }
  if (!o.proof.empty()) {
    std::string text = slurp_file(o.proof);
    ProofNode p = in_file(o.proof, [&] { return parse_proof(text, sig); });
    std::cout << print_proof(p);
    any = true;
  }
  if (!o.ext.empty()) {
    std::string text = slurp_file(o.ext);
    ExtensionContext ctx = in_file(o.ext, [&] { return parse_extension(text, sig); });
    std::cout << print_extension(ctx);
    any = true;
  }
  if (!any) std::cout << print_signature(sig);
  return finish("ok");
}

int run_eval(const Options& o) {
  Signature sig = load_sig(o.sig);
  TvValuation v = load_valuation(o.val, sig);
  Formula f = in_file("<formula>", [&] { return parse_formula(o.formula, sig); });
  EvalMode mode = EvalMode::param_quant();
  if (o.mode == "pureterm") {
    mode = EvalMode::pure_term_quant(o.depth);
  } else if (o.mode != "param") {
    throw error("unknown mode: " + o.mode + " (want param or pureterm)");
  }
  Tri t = eval(v, f, mode);
  std::string token = to_string(t);
  std::string shown = t == Tri::True ? good(token) : t == Tri::False ? bad(token) : meh(token);
  std::cout << "value: " << shown << "\n";
  return finish(token);
}

int run_check(const Options& o) {
  Signature sig = load_sig(o.sig);
  SystemProfile sys = profile_from(o.system);
  std::string prooftext = slurp_file(o.proof);
  ProofNode root = in_file(o.proof, [&] { return parse_proof(prooftext, sig); });
  CheckReport rep;
  if (!o.sequentText.empty()) {
    Sequent seq = parse_sequent(o.sequentText, sig);
    rep = check_sequent(root, seq.premises, seq.goal, sys, sig);
  } else {
    rep = check_deduction(root, sys, sig);
  }
  std::cout << "system: " << sys.name << "\n";
  std::cout << "conclusion: " << print_formula(root.conclusion) << "\n";
  for (const Formula& a : rep.openAssumptions)
    std::cout << "open: " << print_formula(a) << "\n";
  for (const Violation& v : rep.violations)
    std::cout << "violation at " << (v.path.empty() ? "(root)" : v.path) << ": " << v.message
              << "\n";
  return finish(rep.ok ? "ok" : "fail");
}

int run_decide(const Options& o) {
  Signature sig = load_sig(o.sig);
  if (o.system != "nc" && o.system != "nceq")
    throw error("decide supports nc and nceq, got " + o.system);
  SystemProfile sys = profile_from(o.system);
  // sequent text only ever parses to closed formulas, so no purification step
  Sequent seq = parse_sequent(o.sequentText, sig);

  Budget budget{o.maxSteps, o.maxParams};
  DecideOutcome out = decide(seq.premises, seq.goal, sys, sig, budget);
  std::cout << "steps: " << out.stats.steps << " branches: " << out.stats.branches << "\n";
  switch (out.kind) {
    case DecideOutcome::Kind::Proved:
      std::cout << print_certificate(*out.certificate);
      return finish("proved");
    case DecideOutcome::Kind::Countermodel:
      std::cout << print_valuation(*out.valuation);
      return finish("countermodel");
    case DecideOutcome::Kind::Exhausted:
      std::cout << "stuck branches: " << out.stats.stuckBranches << "\n";
      return finish("exhausted");
  }
  throw error("unreachable decide outcome");
}

int run_axioms(const Options& o) {
  Signature sig = load_sig(o.sig);
  if (o.count < 0) throw error("--count must be >= 0");
  size_t want = size_t(o.count);
  std::vector<Formula> axs;
  if (o.kind == "equality") {
    size_t prev = 0;
    for (int round = 0; axs.size() < want && round <= 6; ++round) {
      std::vector<Formula> next = equality_axioms_up_to(sig, round);
      if (round > 0 && next.size() == prev) break;  // saturated: no functions
      prev = next.size();
      axs = std::move(next);
    }
  } else if (o.kind == "strictness") {
    axs = strictness_axioms(sig);
  } else {
    throw error("unknown axiom kind: " + o.kind + " (want equality or strictness)");
  }
  if (axs.size() > want) axs.resize(want);
  for (size_t i = 0; i < axs.size(); ++i)
    std::cout << i << ": " << print_formula(axs[i]) << "\n";
  if (axs.size() < want)
    std::cout << "enumeration exhausted after " << axs.size() << "\n";
  return finish("ok");
}

int run_extend(const Options& o) {
  Signature sig = load_sig(o.sig);
  TvValuation v = load_valuation(o.val, sig);
  std::string text = slurp_file(o.ext);
  ExtensionContext ctx = in_file(o.ext, [&] { return parse_extension(text, sig); });
  std::vector<Formula> samples;
  std::vector<Term> vars;
  for (const auto& [rl, ar] : ctx.base.relations) {
    std::vector<Term> args;
    for (int i = 1; i <= ar; ++i) args.push_back(Term::var("x" + std::to_string(i)));
    samples.push_back(Formula::atom(rl, std::move(args)));
  }
  samples.push_back(Formula::equal(Term::var("x1"), Term::var("x2")));
  ExtensionCheckReport rep = check_extension_property(v, ctx, samples, o.depth);
  std::cout << "extended signature:" << "\n" << print_signature(ctx.extended);
  for (const std::string& m : rep.mismatches) std::cout << "mismatch: " << m << "\n";
  std::cout << "extension property at depth " << o.depth << ": " << verdict(rep.pass) << "\n";
  return finish(rep.pass ? "ok" : "fail");
}

int run_lift(const Options& o) {
  Signature sig = load_sig(o.sig);
  TvValuation v = load_valuation(o.val, sig);
  LiftedValuation lv = lift_undefined(v);
  std::cout << "lifted signature:" << "\n" << print_signature(lv.lifted.sig);
  std::cout << "undef denoting: " << (is_denoting(lv.lifted, Term::apply("undef", {})) ? "yes" : "no")
            << "\n";
  bool ok = true;
  print_check("equality", check_equality_valuation(lv.lifted, o.depth), ok);
  return finish(ok ? "ok" : "fail");
}

int run_selection(const Options& o, bool iota) {
  Signature sig = load_sig(o.sig);
  SelectionSpec spec = selection_from(o.formula, o.varsCsv, o.fname, sig);
  if (iota) {
    std::cout << "iota: " << print_formula(iota_axiom(spec)) << "\n";
    std::cout << "uniqueness: " << print_formula(uniqueness(spec)) << "\n";
  } else {
    auto [first, second] = epsilon_axioms(spec);
    std::cout << "epsilon 1: " << print_formula(first) << "\n";
    std::cout << "epsilon 2: " << print_formula(second) << "\n";
  }
  if (!o.val.empty()) {
    TvValuation v = load_valuation(o.val, sig);
    SelectionSpec sel = spec;
    if (iota) sel.D = unique_existence(spec);
    EpsilonExtension ee = epsilon_extend(v, sel, o.depth);
    std::cout << "base lifted: " << (ee.baseLifted ? "yes" : "no") << "\n";
    std::cout << "interpretation:" << "\n" << print_extension(ee.ctx);
  }
  return finish("ok");
}

int run_verify_valuation(const Options& o, bool eq, bool strict, bool total) {
  Signature sig = load_sig(o.sig);
  TvValuation v = load_valuation(o.val, sig);
  if (!eq && !strict && !total) eq = true;  // the core well-formedness check
  bool ok = true;
  if (eq) print_check("equality", check_equality_valuation(v, o.depth), ok);
  if (strict) print_check("strict", check_strict(v, o.depth), ok);
  if (total) {
    bool td = is_totally_denoting(v);
    std::cout << "total: " << (td ? good("totally denoting") : bad("not totally denoting"))
              << "\n";
    ok = ok && td;
  }
  return finish(ok ? "ok" : "fail");
}

int run_verify_conservativity(const Options& o) {
  Signature sig = load_sig(o.sig);
  TvValuation v = load_valuation(o.val, sig);
  SelectionSpec spec = selection_from(o.formula, o.varsCsv, o.fname, sig);
  ConservativityReport rep = verify_conservativity(v, spec, o.kind, o.depth);
  std::cout << "base lifted: " << (rep.baseLifted ? "yes" : "no") << "\n";
  std::cout << "interpretation:" << "\n" << rep.interpretation;
  for (const AxiomCheck& ax : rep.axioms) {
    std::cout << "axiom " << ax.name << ": " << verdict(ax.pass);
    if (!ax.pass && !ax.witness.empty()) std::cout << " at " << ax.witness;
    std::cout << "\n";
  }
  std::cout << "equality preserved: " << (rep.equalityPreserved ? "yes" : "no") << "\n";
  if (rep.strictnessPreserved)
    std::cout << "strictness preserved: " << (*rep.strictnessPreserved ? "yes" : "no") << "\n";
  return finish(rep.pass ? "ok" : "fail");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"truth-value semantics for the logic of partial terms"};
  app.require_subcommand(1);
  Options o;

  CLI::App* parse = app.add_subcommand("parse", "parse artifacts and print canonical forms");
  parse->add_option("--sig", o.sig, "signature file")->required();
  parse->add_option("--formula", o.formula, "formula text");
  parse->add_option("--term", o.term, "term text");
  parse->add_option("--val", o.val, "valuation file");
  parse->add_option("--proof", o.proof, "proof file");
  parse->add_option("--ext", o.ext, "extension file");

  CLI::App* ev = app.add_subcommand("eval", "evaluate a closed formula under a valuation");
  ev->add_option("--sig", o.sig)->required();
  ev->add_option("--val", o.val)->required();
  ev->add_option("--formula", o.formula)->required();
  ev->add_option("--mode", o.mode, "param or pureterm");
  ev->add_option("--depth", o.depth, "term depth for pureterm mode");

  CLI::App* chk = app.add_subcommand("check", "check a natural deduction proof file");
  chk->add_option("--sig", o.sig)->required();
  chk->add_option("--system", o.system, "nc, nceq, nceqs or ncdowneq")->required();
  chk->add_option("proof", o.proof, "proof file")->required();
  chk->add_option("--sequent", o.sequentText, "check against 'G1 ; G2 |- F'");

  CLI::App* dec = app.add_subcommand("decide", "decide a sequent by systematic tableau");
  dec->add_option("--sig", o.sig)->required();
  dec->add_option("--system", o.system, "nc or nceq")->required();
  dec->add_option("--max-steps", o.maxSteps);
  dec->add_option("--max-params", o.maxParams, "parameter budget per branch");
  dec->add_option("sequent", o.sequentText, "'G1 ; G2 |- F'")->required();

  CLI::App* ax = app.add_subcommand("axioms", "print an axiom enumeration prefix");
  ax->add_option("--sig", o.sig)->required();
  ax->add_option("--kind", o.kind, "equality or strictness")->required();
  ax->add_option("--count", o.count, "how many axioms");

  CLI::App* ext = app.add_subcommand("extend", "project a valuation through an extension");
  ext->add_option("--sig", o.sig)->required();
  ext->add_option("--val", o.val)->required();
  ext->add_option("--ext", o.ext, "extension file")->required();
  ext->add_option("--depth", o.depth, "audit depth");

  CLI::App* lf = app.add_subcommand("lift", "lift a totally denoting valuation to undef");
  lf->add_option("--sig", o.sig)->required();
  lf->add_option("--val", o.val)->required();
  lf->add_option("--depth", o.depth, "equality audit depth");

  CLI::App* eps = app.add_subcommand("epsilon", "selection axioms and interpretation");
  CLI::App* io = app.add_subcommand("iota", "description axioms and interpretation");
  for (CLI::App* sub : {eps, io}) {
    sub->add_option("--sig", o.sig)->required();
    sub->add_option("--formula", o.formula, "selection formula D")->required();
    sub->add_option("--vars", o.varsCsv, "arguments then selected variable, comma separated")
        ->required();
    sub->add_option("--name", o.fname, "fresh function symbol")->required();
    sub->add_option("--val", o.val, "tabulate the selection over this valuation");
    sub->add_option("--depth", o.depth, "tabulation depth");
  }

  CLI::App* vv = app.add_subcommand("verify-valuation", "audit equality/strictness/denotation");
  vv->add_option("--sig", o.sig)->required();
  vv->add_option("--val", o.val)->required();
  vv->add_option("--depth", o.depth, "audit depth");
  bool wantEq = false, wantStrict = false, wantTotal = false;
  vv->add_flag("--equality", wantEq, "equality axioms");
  vv->add_flag("--strict", wantStrict, "strictness axioms");
  vv->add_flag("--total", wantTotal, "total denotation");

  CLI::App* vc = app.add_subcommand("verify-conservativity", "audit a selection extension");
  vc->add_option("--sig", o.sig)->required();
  vc->add_option("--val", o.val)->required();
  vc->add_option("--formula", o.formula, "selection formula D")->required();
  vc->add_option("--vars", o.varsCsv, "arguments then selected variable, comma separated")
      ->required();
  vc->add_option("--name", o.fname, "fresh function symbol")->required();
  vc->add_option("--kind", o.kind, "epsilon or iota")->required();
  vc->add_option("--depth", o.depth, "audit depth");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }

  try {
    if (parse->parsed()) return run_parse(o);
    if (ev->parsed()) return run_eval(o);
    if (chk->parsed()) return run_check(o);
    if (dec->parsed()) return run_decide(o);
    if (ax->parsed()) return run_axioms(o);
    if (ext->parsed()) return run_extend(o);
    if (lf->parsed()) return run_lift(o);
    if (eps->parsed()) return run_selection(o, false);
    if (io->parsed()) return run_selection(o, true);
    if (vv->parsed()) return run_verify_valuation(o, wantEq, wantStrict, wantTotal);
    if (vc->parsed()) return run_verify_conservativity(o);
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  std::cerr << "error: no subcommand\n";
  return 3;
}

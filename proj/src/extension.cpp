#include "plt/extension.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "tuples.hpp"

namespace plt {

using tupledetail::TupleIter;

namespace {

bool term_over(const Signature& sig, const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
      return false;
    case TermKind::Parameter:
      return sig.is_param(t.name());
    case TermKind::Apply: {
      auto ar = sig.function_arity(t.name());
      if (!ar || size_t(*ar) != t.args().size()) return false;
      for (const Term& a : t.args())
        if (!term_over(sig, a)) return false;
      return true;
    }
  }
  return false;
}

bool contains_undef(const Term& t) {
  if (t.kind() == TermKind::Apply) {
    if (t.name() == "undef") return true;
    for (const Term& a : t.args())
      if (contains_undef(a)) return true;
  }
  return false;
}

bool eq_ref(const TvValuation& v, const Term& r, const Term& s) {
  return v.atom_value(Formula::equal(r, s));
}

bool eq_up_impl(const TvValuation& base, const Term& r, const Term& s,
                std::map<std::string, bool>& memo) {
  if (r == s) return true;
  std::string key = print_term(r) + " | " + print_term(s);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  bool out = false;
  if (!contains_undef(r) && !contains_undef(s) && eq_ref(base, r, s)) {
    out = true;
  } else if (r.kind() == TermKind::Apply && s.kind() == TermKind::Apply &&
             r.name() == s.name() && r.args().size() == s.args().size()) {
    out = true;
    for (size_t i = 0; i < r.args().size(); ++i)
      if (!eq_up_impl(base, r.args()[i], s.args()[i], memo)) {
        out = false;
        break;
      }
  }
  memo.emplace(std::move(key), out);
  return out;
}

}  // namespace

Term FunctionInterpretation::apply(const std::vector<Term>& args) const {
  if (args.size() != size_t(arity))
    throw error("interpretation of " + symbol + " takes " + std::to_string(arity) +
                " argument(s), got " + std::to_string(args.size()));
  for (const auto& [tuple, result] : table)
    if (tuple == args) return result;
  return fallback;
}

const FunctionInterpretation* ExtensionContext::interpretation(const std::string& symbol) const {
  for (const FunctionInterpretation& fi : interpretations)
    if (fi.symbol == symbol) return &fi;
  return nullptr;
}

void ExtensionContext::validate() const {
  base.validate();
  extended.validate();
  if (base.params != extended.params)
    throw error("extension must keep the parameter list unchanged");
  if (base.hasUndef != extended.hasUndef)
    throw error("extension must not introduce undef");
  if (base.functions.size() > extended.functions.size() ||
      !std::equal(base.functions.begin(), base.functions.end(), extended.functions.begin()))
    throw error("extended signature does not extend the base functions");
  if (base.relations.size() > extended.relations.size() ||
      !std::equal(base.relations.begin(), base.relations.end(), extended.relations.begin()))
    throw error("extended signature does not extend the base relations");

  std::set<std::string> covered;
  for (const FunctionInterpretation& fi : interpretations) {
    if (!covered.insert(fi.symbol).second)
      throw error("duplicate interpretation for " + fi.symbol);
    auto ar = extended.function_arity(fi.symbol);
    if (!ar || base.function_arity(fi.symbol))
      throw error("interpretation for a symbol that is not a new function: " + fi.symbol);
    if (*ar != fi.arity) throw error("interpretation arity mismatch for " + fi.symbol);
    if (!term_over(base, fi.fallback))
      throw error("interpretation default for " + fi.symbol + " is not a pure base term: " +
                  print_term(fi.fallback));
    for (const auto& [tuple, result] : fi.table) {
      if (tuple.size() != size_t(fi.arity))
        throw error("interpretation entry arity mismatch for " + fi.symbol);
      for (const Term& t : tuple)
        if (!term_over(base, t))
          throw error("interpretation argument for " + fi.symbol +
                      " is not a pure base term: " + print_term(t));
      if (!term_over(base, result))
        throw error("interpretation result for " + fi.symbol + " is not a pure base term: " +
                    print_term(result));
    }
  }
  for (size_t i = base.functions.size(); i < extended.functions.size(); ++i)
    if (!covered.count(extended.functions[i].first))
      throw error("new function lacks an interpretation: " + extended.functions[i].first);
}

Term phi(const ExtensionContext& ctx, const Term& t) {
  switch (t.kind()) {
    case TermKind::Variable:
      throw error("phi projects pure terms only, found variable " + t.name());
    case TermKind::Parameter:
      return t;
    case TermKind::Apply: {
      std::vector<Term> args;
      args.reserve(t.args().size());
      for (const Term& a : t.args()) args.push_back(phi(ctx, a));
      if (ctx.base.function_arity(t.name())) return Term::apply(t.name(), std::move(args));
      if (const FunctionInterpretation* fi = ctx.interpretation(t.name()))
        return fi->apply(args);
      throw error("no interpretation for symbol " + t.name());
    }
  }
  throw error("phi: unreachable");
}

bool is_congruent(const TvValuation& v, const FunctionInterpretation& interp, int depth) {
  std::vector<Term> terms = enumerate_pure_terms(v.sig.with_params(v.domain), depth);
  size_t n = size_t(interp.arity);
  if (n == 0) return true;
  TupleIter lhs(n, terms.size());
  if (lhs.done) return true;
  do {
    TupleIter rhs(n, terms.size());
    do {
      bool equal = true;
      for (size_t i = 0; i < n && equal; ++i)
        equal = eq_ref(v, terms[lhs.idx[i]], terms[rhs.idx[i]]);
      if (!equal) continue;
      std::vector<Term> a, b;
      for (size_t i = 0; i < n; ++i) {
        a.push_back(terms[lhs.idx[i]]);
        b.push_back(terms[rhs.idx[i]]);
      }
      if (!eq_ref(v, interp.apply(a), interp.apply(b))) return false;
    } while (rhs.next());
  } while (lhs.next());
  return true;
}

bool is_strict_interp(const TvValuation& v, const FunctionInterpretation& interp, int depth) {
  std::vector<Term> terms = enumerate_pure_terms(v.sig.with_params(v.domain), depth);
  size_t n = size_t(interp.arity);
  if (n == 0) return true;
  TupleIter it(n, terms.size());
  if (it.done) return true;
  do {
    std::vector<Term> args;
    for (size_t i = 0; i < n; ++i) args.push_back(terms[it.idx[i]]);
    if (!is_denoting(v, interp.apply(args))) continue;
    for (const Term& a : args)
      if (!is_denoting(v, a)) return false;
  } while (it.next());
  return true;
}

TvValuation extend_valuation(const TvValuation& v, const ExtensionContext& ctx,
                             int congruenceDepth) {
  ctx.validate();
  if (print_signature(v.sig) != print_signature(ctx.base))
    throw error("valuation signature differs from the extension base");
  if (check_equality_valuation(v, congruenceDepth).pass)
    for (const FunctionInterpretation& fi : ctx.interpretations)
      if (!is_congruent(v, fi, congruenceDepth))
        throw error("interpretation of " + fi.symbol + " is not congruent at depth " +
                    std::to_string(congruenceDepth));

  TvValuation out;
  out.sig = ctx.extended;
  out.domain = v.domain;
  out.note = "projection of a base valuation through phi";
  out.computed = [base = v, ctx](const Formula& atom) -> bool {
    if (atom.kind() == FormulaKind::Equal)
      return base.atom_value(
          Formula::equal(phi(ctx, atom.terms()[0]), phi(ctx, atom.terms()[1])));
    if (!ctx.base.relation_arity(atom.name())) return false;  // new relations: all false
    std::vector<Term> args;
    for (const Term& t : atom.terms()) args.push_back(phi(ctx, t));
    return base.atom_value(Formula::atom(atom.name(), std::move(args)));
  };
  out.validate();
  return out;
}

bool eq_up(const LiftedValuation& lv, const Term& r, const Term& s) {
  std::map<std::string, bool> memo;
  return eq_up_impl(lv.base, r, s, memo);
}

LiftedValuation lift_undefined(const TvValuation& v) {
  if (v.sig.hasUndef) throw error("valuation already carries undef");
  if (!is_totally_denoting(v)) throw error("lift requires a totally denoting valuation");
  LiftedValuation lv;
  lv.base = v;
  lv.lifted.sig = v.sig.with_undef();
  lv.lifted.domain = v.domain;
  lv.lifted.note = "undef lift of a totally denoting valuation";
  lv.lifted.computed = [base = v](const Formula& atom) -> bool {
    if (atom.kind() == FormulaKind::Equal) {
      std::map<std::string, bool> memo;
      return eq_up_impl(base, atom.terms()[0], atom.terms()[1], memo);
    }
    for (const Term& t : atom.terms())
      if (contains_undef(t)) return false;
    return base.atom_value(atom);
  };
  lv.lifted.validate();
  return lv;
}

ExtensionCheckReport check_extension_property(const TvValuation& v, const ExtensionContext& ctx,
                                              const std::vector<Formula>& samples, int depth,
                                              const TvValuation* extended) {
  ctx.validate();
  ExtensionCheckReport rep;
  rep.depth = depth;
  TvValuation vext = extended ? *extended : extend_valuation(v, ctx);

  for (const Term& t : enumerate_pure_terms(ctx.base.with_params(v.domain), depth)) {
    Term back = phi(ctx, t);
    if (back != t)
      rep.mismatches.push_back("phi moves the base term " + print_term(t) + " to " +
                               print_term(back));
  }

  std::vector<Term> extTerms = enumerate_pure_terms(ctx.extended.with_params(v.domain), depth);
  for (const Formula& sample : samples) {
    std::vector<std::string> vars = free_vars_ordered(sample);
    TupleIter it(vars.size(), extTerms.size());
    if (it.done) continue;
    do {
      std::map<std::string, Term> inst, proj;
      for (size_t i = 0; i < vars.size(); ++i) {
        inst.emplace(vars[i], extTerms[it.idx[i]]);
        proj.emplace(vars[i], phi(ctx, extTerms[it.idx[i]]));
      }
      Formula lhs = substitute(sample, inst);
      Tri a = eval(vext, lhs);
      Tri b = eval(v, substitute(sample, proj));
      if (a != b)
        rep.mismatches.push_back("instance " + print_formula(lhs) + ": extension gives " +
                                 to_string(a) + ", base gives " + to_string(b));
    } while (it.next());
  }
  rep.pass = rep.mismatches.empty();
  return rep;
}

// ---------- Extension files ----------

namespace {

// splits "t1, t2, ..." at top-level commas
std::vector<std::string> split_args(const std::string& s, int lineno) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth < 0) throw error("extension line " + std::to_string(lineno) + ": unbalanced )");
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (depth != 0) throw error("extension line " + std::to_string(lineno) + ": unbalanced (");
  out.push_back(cur);
  return out;
}

std::pair<std::string, int> parse_slashed(const std::string& tok, int lineno) {
  auto slash = tok.find('/');
  if (slash == std::string::npos || slash + 1 >= tok.size())
    throw error("extension line " + std::to_string(lineno) + ": expected name/arity, got " + tok);
  int ar = 0;
  try {
    ar = std::stoi(tok.substr(slash + 1));
  } catch (const std::exception&) {
    throw error("extension line " + std::to_string(lineno) + ": bad arity in " + tok);
  }
  return {tok.substr(0, slash), ar};
}

}  // namespace

ExtensionContext parse_extension(const std::string& text, const Signature& base) {
  ExtensionContext ctx;
  ctx.base = base;
  ctx.extended = base;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto fail = [&](const std::string& msg) -> error {
    return error("extension line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream probe(line);
    std::string head, kind;
    if (!(probe >> head)) continue;
    if (head != "extend") throw fail("unknown directive " + head);
    if (!(probe >> kind)) throw fail("missing extend kind");
    if (kind == "rel") {
      std::string tok;
      if (!(probe >> tok)) throw fail("missing relation name/arity");
      auto [name, ar] = parse_slashed(tok, lineno);
      ctx.extended.relations.emplace_back(name, ar);
    } else if (kind == "const") {
      std::string name, arrow;
      if (!(probe >> name >> arrow) || arrow != "->") throw fail("expected const NAME -> TERM");
      if (name == "undef") throw fail("undef is reserved for the lift");
      std::string rest;
      std::getline(probe, rest);
      FunctionInterpretation fi;
      fi.symbol = name;
      fi.arity = 0;
      fi.fallback = parse_term(rest, base);
      ctx.extended.functions.emplace_back(name, 0);
      ctx.interpretations.push_back(std::move(fi));
    } else if (kind == "fun") {
      std::string tok, what;
      if (!(probe >> tok >> what)) throw fail("expected fun NAME/AR default|map ...");
      auto [name, ar] = parse_slashed(tok, lineno);
      if (name == "undef") throw fail("undef is reserved for the lift");
      if (ar < 1) throw fail("0-ary symbols use the const form");
      if (what == "default") {
        std::string rest;
        std::getline(probe, rest);
        FunctionInterpretation fi;
        fi.symbol = name;
        fi.arity = ar;
        fi.fallback = parse_term(rest, base);
        ctx.extended.functions.emplace_back(name, ar);
        ctx.interpretations.push_back(std::move(fi));
      } else if (what == "map") {
        FunctionInterpretation* fi = nullptr;
        for (FunctionInterpretation& cand : ctx.interpretations)
          if (cand.symbol == name) fi = &cand;
        if (!fi) throw fail("map before the default line for " + name);
        if (fi->arity != ar) throw fail("arity differs from the default line for " + name);
        std::string rest;
        std::getline(probe, rest);
        auto arrow = rest.rfind("->");
        if (arrow == std::string::npos) throw fail("expected map (T, ...) -> TERM");
        std::string lhs = rest.substr(0, arrow), rhs = rest.substr(arrow + 2);
        auto open = lhs.find('(');
        auto close = lhs.rfind(')');
        if (open == std::string::npos || close == std::string::npos || close < open)
          throw fail("map tuple needs parentheses");
        std::vector<Term> tuple;
        for (const std::string& part : split_args(lhs.substr(open + 1, close - open - 1), lineno))
          tuple.push_back(parse_term(part, base));
        if (tuple.size() != size_t(ar)) throw fail("map tuple arity mismatch for " + name);
        fi->table.emplace_back(std::move(tuple), parse_term(rhs, base));
      } else {
        throw fail("expected default or map, got " + what);
      }
    } else {
      throw fail("unknown extend kind " + kind);
    }
  }
  ctx.validate();
  return ctx;
}

std::string print_extension(const ExtensionContext& ctx) {
  std::ostringstream out;
  for (const FunctionInterpretation& fi : ctx.interpretations) {
    if (fi.arity == 0) {
      out << "extend const " << fi.symbol << " -> " << print_term(fi.fallback) << "\n";
      continue;
    }
    out << "extend fun " << fi.symbol << "/" << fi.arity << " default "
        << print_term(fi.fallback) << "\n";
    for (const auto& [tuple, result] : fi.table) {
      out << "extend fun " << fi.symbol << "/" << fi.arity << " map (";
      for (size_t i = 0; i < tuple.size(); ++i)
        out << (i ? ", " : "") << print_term(tuple[i]);
      out << ") -> " << print_term(result) << "\n";
    }
  }
  for (size_t i = ctx.base.relations.size(); i < ctx.extended.relations.size(); ++i)
    out << "extend rel " << ctx.extended.relations[i].first << "/"
        << ctx.extended.relations[i].second << "\n";
  return out.str();
}

}  // namespace plt

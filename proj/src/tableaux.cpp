#include "plt/tableaux.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <set>

namespace plt {

namespace {

enum class Shape { AtomLike, Alpha, Beta, Gamma, Delta };

Shape shape_of(const SignedFormula& sf) {
  switch (sf.formula.kind()) {
    case FormulaKind::Atom:
    case FormulaKind::Equal:
    case FormulaKind::Falsum:
      return Shape::AtomLike;
    case FormulaKind::Not:
      return Shape::Alpha;
    case FormulaKind::And:
      return sf.positive ? Shape::Alpha : Shape::Beta;
    case FormulaKind::Or:
      return sf.positive ? Shape::Beta : Shape::Alpha;
    case FormulaKind::Implies:
      return sf.positive ? Shape::Beta : Shape::Alpha;
    case FormulaKind::Forall:
      return sf.positive ? Shape::Gamma : Shape::Delta;
    case FormulaKind::Exists:
      return sf.positive ? Shape::Delta : Shape::Gamma;
  }
  return Shape::AtomLike;
}

std::vector<SignedFormula> alpha_parts(const SignedFormula& sf) {
  const Formula& f = sf.formula;
  if (f.kind() == FormulaKind::Not) return {{!sf.positive, f.child()}};
  if (f.kind() == FormulaKind::And) return {{true, f.left()}, {true, f.right()}};
  if (f.kind() == FormulaKind::Or) return {{false, f.left()}, {false, f.right()}};
  return {{true, f.left()}, {false, f.right()}};  // F.(A -> B)
}

std::pair<SignedFormula, SignedFormula> beta_parts(const SignedFormula& sf) {
  const Formula& f = sf.formula;
  if (f.kind() == FormulaKind::Or) return {{true, f.left()}, {true, f.right()}};
  if (f.kind() == FormulaKind::And) return {{false, f.left()}, {false, f.right()}};
  return {{false, f.left()}, {true, f.right()}};  // T.(A -> B)
}

SignedFormula instance_at(const SignedFormula& sf, const std::string& param) {
  return {sf.positive,
          substitute(sf.formula.body(), {{sf.formula.name(), Term::param(param)}})};
}

void ordered_params(const Term& t, std::vector<std::string>& out) {
  if (t.kind() == TermKind::Parameter &&
      std::find(out.begin(), out.end(), t.name()) == out.end())
    out.push_back(t.name());
  for (const Term& a : t.args()) ordered_params(a, out);
}

void ordered_params(const Formula& f, std::vector<std::string>& out) {
  for (const Term& t : f.terms()) ordered_params(t, out);
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      ordered_params(f.child(), out);
      break;
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      ordered_params(f.left(), out);
      ordered_params(f.right(), out);
      break;
    default:
      break;
  }
}

int formula_term_depth(const Formula& f) {
  int d = 0;
  for (const Term& t : f.terms()) d = std::max(d, term_depth(t));
  switch (f.kind()) {
    case FormulaKind::Not:
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return std::max(d, formula_term_depth(f.child()));
    case FormulaKind::And:
    case FormulaKind::Or:
    case FormulaKind::Implies:
      return std::max({d, formula_term_depth(f.left()), formula_term_depth(f.right())});
    default:
      return d;
  }
}

}  // namespace

std::string print_signed(const SignedFormula& sf) {
  return (sf.positive ? "T " : "F ") + print_formula(sf.formula);
}

bool branch_closed(const Branch& b) {
  std::map<std::string, bool> seen;
  for (const SignedFormula& sf : b.formulas) {
    if (sf.positive && sf.formula.kind() == FormulaKind::Falsum) return true;
    auto [it, inserted] = seen.emplace(print_formula(sf.formula), sf.positive);
    if (!inserted && it->second != sf.positive) return true;
  }
  return false;
}

std::vector<std::pair<size_t, Formula>> tableau_equality_pool(const Signature& sig) {
  static std::mutex mu;
  static std::map<std::string, std::vector<std::pair<size_t, Formula>>> cache;
  std::string key = print_signature(sig);
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }

  // One representative per family, all variables distinct.  Instantiating the
  // representative at every parameter tuple covers each identified-variable
  // variant, so carrying those variants too would only multiply gamma work.
  auto var = [](size_t i) { return Term::var("x" + std::to_string(i)); };
  auto close_over = [&](Formula f, size_t nvars) {
    for (size_t i = nvars; i >= 1; --i) f = Formula::forall("x" + std::to_string(i), std::move(f));
    return f;
  };
  std::vector<std::string> wanted;
  wanted.push_back(print_formula(close_over(Formula::equal(var(1), var(1)), 1)));
  wanted.push_back(print_formula(close_over(
      Formula::implies(Formula::equal(var(1), var(2)), Formula::equal(var(2), var(1))), 2)));
  wanted.push_back(print_formula(close_over(
      Formula::implies(Formula::equal(var(1), var(2)),
                       Formula::implies(Formula::equal(var(2), var(3)),
                                        Formula::equal(var(1), var(3)))),
      3)));
  auto congruence = [&](const std::string& sym, int arity, bool relation) {
    std::vector<Term> lhs, rhs;
    for (int i = 0; i < arity; ++i) {
      lhs.push_back(var(size_t(2 * i + 1)));
      rhs.push_back(var(size_t(2 * i + 2)));
    }
    Formula f = relation ? Formula::implies(Formula::atom(sym, lhs), Formula::atom(sym, rhs))
                         : Formula::equal(Term::apply(sym, lhs), Term::apply(sym, rhs));
    for (int i = arity - 1; i >= 0; --i)
      f = Formula::implies(
          Formula::equal(var(size_t(2 * i + 1)), var(size_t(2 * i + 2))), std::move(f));
    return close_over(std::move(f), size_t(2 * arity));
  };
  for (const auto& [fn, ar] : sig.functions) {
    if (ar == 0) {
      Term c = Term::apply(fn, {});
      wanted.push_back(print_formula(Formula::equal(c, c)));
    } else {
      wanted.push_back(print_formula(congruence(fn, ar, false)));
    }
  }
  for (const auto& [rl, ar] : sig.relations)
    if (ar >= 1) wanted.push_back(print_formula(congruence(rl, ar, true)));

  // Scan the enumeration for those representatives, stopping when a round
  // would be too expensive to generate; whatever lies beyond the affordable
  // prefix is simply dropped and the pool comes out truncated.
  int maxAr = 0;
  size_t consts = 0;
  for (const auto& [fn, ar] : sig.functions) {
    maxAr = std::max(maxAr, ar);
    if (ar == 0) ++consts;
  }
  for (const auto& [rl, ar] : sig.relations) maxAr = std::max(maxAr, ar);
  int slots = std::max(3, 2 * maxAr);
  auto affordable = [&](int r) {
    double base = double(r + 1) + double(consts), n = base;
    for (int d = 1; d <= r; ++d) {
      double nn = base;
      for (const auto& [fn, ar] : sig.functions)
        if (ar >= 1) nn += std::pow(n, ar);
      n = nn;
    }
    return std::pow(n, slots) <= 200000.0;
  };

  std::vector<std::pair<size_t, Formula>> pool;
  std::set<std::string> missing(wanted.begin(), wanted.end());
  size_t scanned = 0, prev = 0;
  for (int round = 0; round <= 6 && !missing.empty() && affordable(round); ++round) {
    std::vector<Formula> axs = equality_axioms_up_to(sig, round);
    if (round > 0 && axs.size() == prev) break;  // saturated: nothing new will appear
    prev = axs.size();
    for (; scanned < axs.size(); ++scanned) {
      std::string s = print_formula(axs[scanned]);
      if (missing.erase(s)) pool.emplace_back(scanned, axs[scanned]);
    }
  }
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, pool);
  return pool;
}

TvValuation extract_countermodel(const Branch& b, const SystemProfile& sys,
                                 const Signature& sig) {
  if (branch_closed(b)) throw error("branch is closed");
  for (size_t i = 0; i < b.formulas.size(); ++i) {
    Shape sh = shape_of(b.formulas[i]);
    if (sh == Shape::AtomLike) continue;
    bool ok = false;
    if (sh == Shape::Gamma) {
      for (const GammaEntry& g : b.gammaQueue) {
        if (g.src != i) continue;
        ok = true;
        for (const std::string& p : b.usedParameters)
          if (std::find(g.done.begin(), g.done.end(), p) == g.done.end()) ok = false;
        if (ok) break;
      }
    } else {
      ok = i < b.processed.size() && b.processed[i];
    }
    if (!ok) throw error("branch is not saturated at " + print_signed(b.formulas[i]));
  }
  if (b.usedParameters.empty()) throw error("branch has no parameters");

  TvValuation v;
  std::vector<std::string> ps = sig.params;
  for (const std::string& p : b.usedParameters)
    if (std::find(ps.begin(), ps.end(), p) == ps.end()) ps.push_back(p);
  v.sig = sig.with_params(ps);
  v.domain = b.usedParameters;

  std::set<std::string> negative;
  for (const SignedFormula& sf : b.formulas)
    if (!sf.positive && shape_of(sf) == Shape::AtomLike &&
        sf.formula.kind() != FormulaKind::Falsum)
      negative.insert(print_formula(sf.formula));
  for (const SignedFormula& sf : b.formulas) {
    if (shape_of(sf) != Shape::AtomLike || sf.formula.kind() == FormulaKind::Falsum) continue;
    v.atoms.emplace_back(sf.formula, sf.positive);
  }
  if (sys.name != "Nc") {
    // reflexive equalities over the domain terms, deep enough to satisfy the
    // depth-1 equality check (whose congruence clause looks one level up);
    // high-arity signatures get only the affordable prefix
    Signature over = sig.with_params(b.usedParameters);
    std::vector<Term> terms = enumerate_pure_terms(over, 1);
    if (terms.size() <= 200) {
      std::vector<Term> deeper = enumerate_pure_terms(over, 2);
      if (deeper.size() <= 5000) terms = std::move(deeper);
    }
    for (const Term& t : terms) {
      Formula refl = Formula::equal(t, t);
      if (negative.count(print_formula(refl))) continue;
      v.atoms.emplace_back(refl, true);
    }
  }
  v.validate();
  return v;
}

// ---------- The decision engine ----------

namespace {

struct EngineBranch {
  Branch b;
  std::map<std::string, std::pair<bool, size_t>> seen;  // formula print -> sign, first index
  std::deque<size_t> work;                              // pending alpha/beta/delta
  size_t gammaCursor = 0;
  bool closed = false;
  bool stuck = false;
  std::optional<std::pair<size_t, size_t>> closePair;
  std::vector<CertNode>* slot = nullptr;
};

struct Engine {
  const std::vector<Formula>& premises;
  const Formula& goal;
  const SystemProfile& sys;
  const Signature& sig;
  Budget budget;
  bool eq;

  std::vector<std::pair<size_t, Formula>> pool;
  Certificate cert;
  std::deque<EngineBranch> branches;
  std::deque<size_t> queue;
  BudgetStats stats;

  bool present(const EngineBranch& eb, const SignedFormula& sf) const {
    auto it = eb.seen.find(print_formula(sf.formula));
    return it != eb.seen.end() && it->second.first == sf.positive;
  }

  // 0 added, 1 duplicate, 2 closed the branch
  int add(EngineBranch& eb, const SignedFormula& sf, bool force) {
    std::string key = print_formula(sf.formula);
    auto it = eb.seen.find(key);
    if (it != eb.seen.end() && it->second.first == sf.positive && !force) return 1;
    size_t idx = eb.b.formulas.size();
    eb.b.formulas.push_back(sf);
    eb.b.processed.push_back(false);
    if (it == eb.seen.end()) eb.seen.emplace(key, std::make_pair(sf.positive, idx));
    if (sf.positive && sf.formula.kind() == FormulaKind::Falsum) {
      eb.closed = true;
      eb.closePair = {{idx, SIZE_MAX}};
      return 2;
    }
    if (it != eb.seen.end() && it->second.first != sf.positive) {
      size_t tI = sf.positive ? idx : it->second.second;
      size_t fI = sf.positive ? it->second.second : idx;
      eb.closed = true;
      eb.closePair = {{tI, fI}};
      return 2;
    }
    switch (shape_of(sf)) {
      case Shape::AtomLike:
        break;
      case Shape::Gamma:
        eb.b.gammaQueue.push_back({idx, {}});
        break;
      default:
        eb.work.push_back(idx);
        break;
    }
    return 0;
  }

  void emit_close(EngineBranch& eb) {
    CertNode n;
    n.kind = CertNode::Kind::Close;
    n.closeA = eb.closePair->first;
    n.closeB = eb.closePair->second;
    eb.slot->push_back(std::move(n));
  }

  std::string fresh_param(const EngineBranch& eb) const {
    for (int i = 0;; ++i) {
      std::string c = "p" + std::to_string(i);
      if (sig.is_param(c)) continue;
      if (std::find(eb.b.usedParameters.begin(), eb.b.usedParameters.end(), c) !=
          eb.b.usedParameters.end())
        continue;
      return c;
    }
  }

  void note_params(const EngineBranch& eb) {
    stats.parameters = std::max(stats.parameters, eb.b.usedParameters.size());
  }

  void mark_stuck(EngineBranch& eb) {
    eb.stuck = true;
    ++stats.stuckBranches;
  }

  // depth-first: the continuing branch goes on top so one branch runs to
  // closure or saturation before its siblings get a turn
  void requeue(size_t id) { queue.push_front(id); }

  void apply_work(size_t id) {
    EngineBranch& eb = branches[id];
    size_t idx = eb.work.front();
    eb.work.pop_front();
    SignedFormula sf = eb.b.formulas[idx];
    eb.b.processed[idx] = true;
    Shape sh = shape_of(sf);

    if (sh == Shape::Alpha) {
      std::vector<SignedFormula> missing;
      for (const SignedFormula& p : alpha_parts(sf))
        if (!present(eb, p) &&
            std::find(missing.begin(), missing.end(), p) == missing.end())
          missing.push_back(p);
      if (missing.empty()) {
        requeue(id);
        return;
      }
      CertNode node;
      node.kind = CertNode::Kind::Alpha;
      node.src = idx;
      node.options.resize(1);
      eb.slot->push_back(std::move(node));
      CertNode& n = eb.slot->back();
      bool done = false;
      for (const SignedFormula& p : missing) {
        n.options[0].added.push_back(p);
        if (add(eb, p, false) == 2) {
          done = true;
          break;
        }
      }
      eb.slot = &n.options[0].rest;
      if (done) {
        emit_close(eb);
        return;
      }
      requeue(id);
      return;
    }

    if (sh == Shape::Beta) {
      auto [l, r] = beta_parts(sf);
      if (present(eb, l) || present(eb, r)) {  // one side already holds
        requeue(id);
        return;
      }
      CertNode node;
      node.kind = CertNode::Kind::Beta;
      node.src = idx;
      node.options.resize(2);
      node.options[0].added = {l};
      node.options[1].added = {r};
      eb.slot->push_back(std::move(node));
      CertNode& n = eb.slot->back();
      size_t cloneId = branches.size();
      branches.push_back(branches[id]);
      ++stats.branches;
      EngineBranch& orig = branches[id];
      EngineBranch& twin = branches.back();
      orig.slot = &n.options[0].rest;
      twin.slot = &n.options[1].rest;
      if (add(twin, r, false) == 2)
        emit_close(twin);
      else
        requeue(cloneId);
      if (add(orig, l, false) == 2)
        emit_close(orig);
      else
        requeue(id);
      return;
    }

    // Delta: witness options are every existing parameter plus one fresh
    for (const std::string& p : eb.b.usedParameters)
      if (present(eb, instance_at(sf, p))) {  // already realized
        requeue(id);
        return;
      }
    if (eb.b.usedParameters.size() >= budget.maxParams) {
      mark_stuck(eb);
      return;
    }
    std::string fp = fresh_param(eb);
    size_t k = eb.b.usedParameters.size();
    CertNode node;
    node.kind = CertNode::Kind::Delta;
    node.src = idx;
    node.options.resize(k + 1);
    for (size_t i = 0; i < k; ++i) {
      node.options[i].param = eb.b.usedParameters[i];
      node.options[i].added = {instance_at(sf, eb.b.usedParameters[i])};
    }
    node.options[k].param = fp;
    node.options[k].fresh = true;
    node.options[k].added = {instance_at(sf, fp)};
    eb.slot->push_back(std::move(node));
    CertNode& n = eb.slot->back();
    std::vector<size_t> ids(k + 1, id);
    for (size_t i = 1; i <= k; ++i) {
      ids[i] = branches.size();
      branches.push_back(branches[id]);
      ++stats.branches;
    }
    for (size_t i = k + 1; i-- > 0;) {  // reversed so option 0 pops first
      EngineBranch& x = branches[ids[i]];
      x.slot = &n.options[i].rest;
      if (i == k) {
        x.b.usedParameters.push_back(fp);
        note_params(x);
      }
      if (add(x, n.options[i].added[0], false) == 2)
        emit_close(x);
      else
        requeue(ids[i]);
    }
  }

  std::optional<std::pair<size_t, std::string>> pending_gamma(const EngineBranch& eb) const {
    const auto& q = eb.b.gammaQueue;
    for (size_t off = 0; off < q.size(); ++off) {
      size_t i = (eb.gammaCursor + off) % q.size();
      for (const std::string& p : eb.b.usedParameters)
        if (std::find(q[i].done.begin(), q[i].done.end(), p) == q[i].done.end())
          return std::make_pair(i, p);
    }
    return std::nullopt;
  }

  void apply_gamma(size_t id, size_t entry, const std::string& p) {
    EngineBranch& eb = branches[id];
    size_t src = eb.b.gammaQueue[entry].src;
    eb.b.gammaQueue[entry].done.push_back(p);
    eb.gammaCursor = (entry + 1) % eb.b.gammaQueue.size();
    SignedFormula inst = instance_at(eb.b.formulas[src], p);
    if (present(eb, inst)) {
      requeue(id);
      return;
    }
    CertNode node;
    node.kind = CertNode::Kind::Gamma;
    node.src = src;
    node.options.resize(1);
    node.options[0].param = p;
    node.options[0].added = {inst};
    eb.slot->push_back(std::move(node));
    CertNode& n = eb.slot->back();
    eb.slot = &n.options[0].rest;
    if (add(eb, inst, false) == 2) {
      emit_close(eb);
      return;
    }
    requeue(id);
  }

  void apply_eq(size_t id) {
    EngineBranch& eb = branches[id];
    auto [enumIdx, ax] = pool[eb.b.equalityIndex++];
    SignedFormula sf{true, ax};
    if (present(eb, sf)) {
      requeue(id);
      return;
    }
    CertNode node;
    node.kind = CertNode::Kind::Eq;
    node.eqIndex = enumIdx;
    node.options.resize(1);
    node.options[0].added = {sf};
    eb.slot->push_back(std::move(node));
    CertNode& n = eb.slot->back();
    eb.slot = &n.options[0].rest;
    if (add(eb, sf, false) == 2) {
      emit_close(eb);
      return;
    }
    requeue(id);
  }

  bool countermodel_ok(const TvValuation& v) const {
    for (const Formula& p : premises)
      if (eval(v, p) != Tri::True) return false;
    if (eval(v, goal) != Tri::False) return false;
    if (eq) {
      // no countermodel claim when the equality check itself is unaffordable
      if (enumerate_pure_terms(v.sig.with_params(v.domain), 1).size() > 200) return false;
      if (!check_equality_valuation(v, 1).pass) return false;
    }
    return true;
  }

  DecideOutcome finish(DecideOutcome::Kind kind) {
    DecideOutcome out;
    out.kind = kind;
    out.stats = stats;
    if (kind == DecideOutcome::Kind::Proved) out.certificate = std::move(cert);
    return out;
  }

  DecideOutcome run() {
    if (eq) pool = tableau_equality_pool(sig);
    for (const Formula& p : premises) cert.initial.push_back({true, p});
    cert.initial.push_back({false, goal});

    branches.emplace_back();
    EngineBranch& root = branches.back();
    root.slot = &cert.steps;
    for (const SignedFormula& sf : cert.initial) ordered_params(sf.formula, root.b.usedParameters);
    note_params(root);
    for (const SignedFormula& sf : cert.initial)
      if (add(root, sf, true) == 2) break;
    if (root.closed) {
      emit_close(root);
      return finish(DecideOutcome::Kind::Proved);
    }
    queue.push_back(0);

    while (!queue.empty()) {
      if (stats.steps >= budget.maxSteps) return finish(DecideOutcome::Kind::Exhausted);
      size_t id = queue.front();
      queue.pop_front();
      ++stats.steps;
      EngineBranch& eb = branches[id];
      if (!eb.work.empty()) {
        apply_work(id);
        continue;
      }
      if (auto g = pending_gamma(eb)) {
        apply_gamma(id, g->first, g->second);
        continue;
      }
      if (eq && eb.b.equalityIndex < pool.size()) {
        apply_eq(id);
        continue;
      }
      if (eb.b.usedParameters.empty()) {
        eb.b.usedParameters.push_back(fresh_param(eb));
        note_params(eb);
        requeue(id);
        continue;
      }
      // saturated: try to read a countermodel off this branch
      try {
        TvValuation v = extract_countermodel(eb.b, sys, sig);
        if (countermodel_ok(v)) {
          DecideOutcome out;
          out.kind = DecideOutcome::Kind::Countermodel;
          out.valuation = std::move(v);
          out.stats = stats;
          return out;
        }
      } catch (const error&) {
      }
      mark_stuck(eb);
    }
    return finish(stats.stuckBranches ? DecideOutcome::Kind::Exhausted
                                      : DecideOutcome::Kind::Proved);
  }
};

}  // namespace

DecideOutcome decide(const std::vector<Formula>& premises, const Formula& goal,
                     const SystemProfile& sys, const Signature& sig, Budget budget) {
  if (sys.name != "Nc" && sys.name != "NcEq")
    throw error("decide supports Nc and NcEq, not " + sys.name);
  if (budget.maxSteps == 0 || budget.maxParams == 0) throw error("budget must be positive");
  for (const Formula& p : premises)
    if (!is_pure(p)) throw error("non-pure premise: " + print_formula(p));
  if (!is_pure(goal)) throw error("non-pure goal: " + print_formula(goal));
  Engine e{premises, goal, sys, sig, budget, sys.name == "NcEq", {}, {}, {}, {}, {}};
  return e.run();
}

// ---------- Certificates ----------

namespace {

std::string kind_name(CertNode::Kind k) {
  switch (k) {
    case CertNode::Kind::Alpha: return "alpha";
    case CertNode::Kind::Beta: return "beta";
    case CertNode::Kind::Gamma: return "gamma";
    case CertNode::Kind::Delta: return "delta";
    case CertNode::Kind::Eq: return "eq";
    case CertNode::Kind::Close: return "close";
  }
  return "?";
}

void print_node(const CertNode& n, int ind, std::string& out) {
  std::string pad(ind, ' ');
  if (n.kind == CertNode::Kind::Close) {
    out += pad + "close " + std::to_string(n.closeA);
    if (n.closeB != SIZE_MAX) out += " " + std::to_string(n.closeB);
    out += "\n";
    return;
  }
  bool branching = n.kind == CertNode::Kind::Beta || n.kind == CertNode::Kind::Delta;
  for (const CertNode::Option& o : n.options) {
    std::string opad = branching ? pad + "  " : pad;
    for (const SignedFormula& sf : o.added) {
      out += opad + kind_name(n.kind);
      if (n.kind != CertNode::Kind::Eq) out += " " + std::to_string(n.src);
      if (n.eqIndex) out += " index=" + std::to_string(*n.eqIndex);
      if (o.param) out += " param=@" + *o.param;
      if (o.fresh) out += " fresh";
      out += " : " + print_signed(sf) + "\n";
    }
    if (!o.rest.empty()) print_node(o.rest[0], branching ? ind + 2 : ind, out);
  }
}

}  // namespace

std::string print_certificate(const Certificate& c) {
  std::string out;
  for (const SignedFormula& sf : c.initial) out += print_signed(sf) + "\n";
  for (const CertNode& n : c.steps) print_node(n, 0, out);
  return out;
}

namespace {

struct Replayer {
  const Signature& sig;
  bool eq;
  std::optional<std::vector<std::pair<size_t, Formula>>> pool;

  const std::vector<std::pair<size_t, Formula>>& get_pool() {
    if (!pool) pool = tableau_equality_pool(sig);
    return *pool;
  }

  bool descend(const CertNode::Option& o, std::vector<SignedFormula>& path,
               std::set<std::string> params) {
    if (o.rest.size() != 1) return false;
    if (o.param) params.insert(*o.param);
    size_t before = path.size();
    for (const SignedFormula& sf : o.added) {
      path.push_back(sf);
      std::vector<std::string> ps;
      ordered_params(sf.formula, ps);
      params.insert(ps.begin(), ps.end());
    }
    bool ok = replay(o.rest[0], path, params);
    path.resize(before);
    return ok;
  }

  bool replay(const CertNode& n, std::vector<SignedFormula>& path,
              const std::set<std::string>& params) {
    switch (n.kind) {
      case CertNode::Kind::Close: {
        if (n.closeA >= path.size()) return false;
        if (n.closeB == SIZE_MAX)
          return path[n.closeA].positive &&
                 path[n.closeA].formula.kind() == FormulaKind::Falsum;
        if (n.closeB >= path.size()) return false;
        return path[n.closeA].positive && !path[n.closeB].positive &&
               path[n.closeA].formula == path[n.closeB].formula;
      }
      case CertNode::Kind::Alpha: {
        if (n.src >= path.size() || shape_of(path[n.src]) != Shape::Alpha) return false;
        if (n.options.size() != 1) return false;
        const CertNode::Option& o = n.options[0];
        if (o.param || o.fresh || o.added.empty()) return false;
        std::vector<SignedFormula> parts = alpha_parts(path[n.src]);
        for (size_t i = 0; i < o.added.size(); ++i) {
          if (std::find(parts.begin(), parts.end(), o.added[i]) == parts.end()) return false;
          for (size_t j = 0; j < i; ++j)
            if (o.added[j] == o.added[i]) return false;
        }
        return descend(o, path, params);
      }
      case CertNode::Kind::Beta: {
        if (n.src >= path.size() || shape_of(path[n.src]) != Shape::Beta) return false;
        if (n.options.size() != 2) return false;
        auto [l, r] = beta_parts(path[n.src]);
        const CertNode::Option& ol = n.options[0];
        const CertNode::Option& orr = n.options[1];
        if (ol.param || orr.param || ol.fresh || orr.fresh) return false;
        if (ol.added != std::vector<SignedFormula>{l}) return false;
        if (orr.added != std::vector<SignedFormula>{r}) return false;
        return descend(ol, path, params) && descend(orr, path, params);
      }
      case CertNode::Kind::Gamma: {
        if (n.src >= path.size() || shape_of(path[n.src]) != Shape::Gamma) return false;
        if (n.options.size() != 1) return false;
        const CertNode::Option& o = n.options[0];
        if (!o.param || o.fresh) return false;
        if (o.added != std::vector<SignedFormula>{instance_at(path[n.src], *o.param)})
          return false;
        return descend(o, path, params);
      }
      case CertNode::Kind::Delta: {
        if (n.src >= path.size() || shape_of(path[n.src]) != Shape::Delta) return false;
        if (n.options.empty()) return false;
        std::set<std::string> chosen;
        for (size_t i = 0; i < n.options.size(); ++i) {
          const CertNode::Option& o = n.options[i];
          if (!o.param || !chosen.insert(*o.param).second) return false;
          bool last = i + 1 == n.options.size();
          if (o.fresh != last) return false;
          if (last && (params.count(*o.param) || sig.is_param(*o.param))) return false;
          if (!last && !params.count(*o.param)) return false;
          if (o.added != std::vector<SignedFormula>{instance_at(path[n.src], *o.param)})
            return false;
          if (!descend(o, path, params)) return false;
        }
        return true;
      }
      case CertNode::Kind::Eq: {
        if (!eq || !n.eqIndex) return false;
        if (n.options.size() != 1) return false;
        const CertNode::Option& o = n.options[0];
        if (o.param || o.fresh || o.added.size() != 1 || !o.added[0].positive) return false;
        for (const auto& [idx, ax] : get_pool())
          if (idx == *n.eqIndex) return o.added[0].formula == ax && descend(o, path, params);
        return false;
      }
    }
    return false;
  }
};

}  // namespace

bool verify_certificate(const Certificate& c, const std::vector<Formula>& premises,
                        const Formula& goal, const SystemProfile& sys, const Signature& sig) {
  try {
    if (sys.name != "Nc" && sys.name != "NcEq") return false;
    std::vector<SignedFormula> expected;
    for (const Formula& p : premises) expected.push_back({true, p});
    expected.push_back({false, goal});
    if (c.initial.size() != expected.size()) return false;
    for (size_t i = 0; i < expected.size(); ++i)
      if (!(c.initial[i] == expected[i])) return false;
    if (c.steps.size() != 1) return false;
    std::vector<SignedFormula> path = c.initial;
    std::set<std::string> params(sig.params.begin(), sig.params.end());
    for (const SignedFormula& sf : c.initial) {
      std::vector<std::string> ps;
      ordered_params(sf.formula, ps);
      params.insert(ps.begin(), ps.end());
    }
    Replayer r{sig, sys.name == "NcEq", std::nullopt};
    return r.replay(c.steps[0], path, params);
  } catch (const error&) {
    return false;
  }
}

}  // namespace plt

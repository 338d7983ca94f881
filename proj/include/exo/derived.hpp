#pragma once

// Derived predicates. A rule derives head atoms from a conjunctive body over
// typed variables. Body literals are positive (variables beyond the head are
// existential) or negative (their exclusive variables are universal, i.e. the
// atom must be false for every binding).
//
// The simulator recomputes derived atoms from scratch after effects apply;
// the relaxed planning graph applies only the rules flagged use_in_rpg, which
// must be positive-only, additively.

#include <stdexcept>
#include <vector>

#include "exo/process.hpp"

namespace exo {

struct DerivedLiteral {
  PredId pred = -1;
  std::vector<int> args;  // indices into rule vars
  bool positive = true;
};

struct DerivedPredicateRule {
  std::string name;
  std::vector<Variable> vars;
  PredId head = -1;
  std::vector<int> head_args;
  std::vector<DerivedLiteral> body;
  bool use_in_sim = true;
  bool use_in_rpg = false;
};

struct DerivedRuleSet {
  std::vector<DerivedPredicateRule> rules;
  std::vector<PredId> derived_preds;  // predicates cleared before re-deriving

  bool empty() const { return rules.empty() && derived_preds.empty(); }
};

namespace detail {

// classify rule vars: head vars, existential (appear in a positive literal),
// universal (only in negative literals)
inline void rule_var_kinds(const DerivedPredicateRule& r,
                           std::vector<int>& kinds) {
  kinds.assign(r.vars.size(), 2);  // 2 = universal
  for (const DerivedLiteral& l : r.body)
    if (l.positive)
      for (int v : l.args) kinds[v] = 1;  // existential
  for (int v : r.head_args) kinds[v] = 0;  // head
}

inline bool eval_negatives(const Symbols& sym, const TaskUniverse& u,
                           const DerivedPredicateRule& r,
                           const std::vector<int>& kinds,
                           std::vector<ObjectId>& binding,
                           const AbstractState& s,
                           const std::vector<std::vector<ObjectId>>& by_type) {
  // all universal vars over all their objects: every negative literal false
  for (const DerivedLiteral& l : r.body) {
    if (l.positive) continue;
    // collect the literal's universal vars
    std::vector<int> uni;
    for (int v : l.args)
      if (kinds[v] == 2) uni.push_back(v);
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    // enumerate
    std::vector<size_t> idx(uni.size(), 0);
    while (true) {
      for (size_t k = 0; k < uni.size(); ++k)
        binding[uni[k]] = by_type[r.vars[uni[k]].type][idx[k]];
      GroundAtom g;
      g.pred = l.pred;
      for (int v : l.args) g.args.push_back(binding[v]);
      if (u.contains(g) && s.test(u.id_of(g))) return false;
      size_t k = 0;
      for (; k < uni.size(); ++k) {
        if (++idx[k] < by_type[r.vars[uni[k]].type].size()) break;
        idx[k] = 0;
      }
      if (uni.empty() || k == uni.size()) break;
    }
  }
  return true;
}

inline void apply_rule(const Symbols& sym, const TaskUniverse& u,
                       const DerivedPredicateRule& r, AbstractState& s,
                       const std::vector<std::vector<ObjectId>>& by_type,
                       bool positives_only) {
  std::vector<int> kinds;
  rule_var_kinds(r, kinds);
  // enumerate head + existential vars
  std::vector<int> en;
  for (int v = 0; v < (int)r.vars.size(); ++v)
    if (kinds[v] != 2) en.push_back(v);
  std::vector<ObjectId> binding(r.vars.size(), -1);
  std::vector<size_t> idx(en.size(), 0);
  while (true) {
    bool feasible = true;
    for (size_t k = 0; k < en.size(); ++k) {
      const auto& objs = by_type[r.vars[en[k]].type];
      if (objs.empty()) { feasible = false; break; }
      binding[en[k]] = objs[idx[k]];
    }
    if (!feasible) return;
    bool ok = true;
    for (const DerivedLiteral& l : r.body) {
      if (!l.positive) continue;
      GroundAtom g;
      g.pred = l.pred;
      for (int v : l.args) g.args.push_back(binding[v]);
      if (!u.contains(g) || !s.test(u.id_of(g))) {
        ok = false;
        break;
      }
    }
    if (ok && !positives_only)
      ok = eval_negatives(sym, u, r, kinds, binding, s, by_type);
    if (ok) {
      GroundAtom h;
      h.pred = r.head;
      for (int v : r.head_args) h.args.push_back(binding[v]);
      if (u.contains(h)) s.set(u.id_of(h));
    }
    size_t k = 0;
    for (; k < en.size(); ++k) {
      if (++idx[k] < by_type[r.vars[en[k]].type].size()) break;
      idx[k] = 0;
    }
    if (en.empty() || k == en.size()) break;
  }
}

}  // namespace detail

// Simulator refresh: clear every derived predicate's atoms, then apply the
// sim rules to a fixed point. Negative literals are evaluated against the
// current state, so rules whose heads feed other rules' negatives are not
// supported (none of ours do).
inline void refresh_derived(const Symbols& sym, const TaskUniverse& u,
                            const DerivedRuleSet& rules, AbstractState& s) {
  if (rules.empty()) return;
  std::vector<std::vector<ObjectId>> by_type(sym.types.size());
  for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
    by_type[sym.objects[o].type].push_back(o);
  std::vector<bool> derived(sym.preds.size(), false);
  for (PredId p : rules.derived_preds) derived[p] = true;
  for (AtomId i = 0; i < u.size(); ++i)
    if (derived[u.atoms[i].pred]) s.reset(i);
  AbstractState prev;
  do {
    prev = s;
    for (const DerivedPredicateRule& r : rules.rules)
      if (r.use_in_sim) detail::apply_rule(sym, u, r, s, by_type, false);
  } while (!(prev == s));
}

// Relaxed-graph application: positive-body rules only, additive, to a fixed
// point. Callers pass the current layer's atom set.
inline void apply_derived_rpg(const Symbols& sym, const TaskUniverse& u,
                              const DerivedRuleSet& rules, AbstractState& s) {
  if (rules.empty()) return;
  std::vector<std::vector<ObjectId>> by_type(sym.types.size());
  for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
    by_type[sym.objects[o].type].push_back(o);
  AbstractState prev;
  do {
    prev = s;
    for (const DerivedPredicateRule& r : rules.rules) {
      if (!r.use_in_rpg) continue;
      for (const DerivedLiteral& l : r.body)
        if (!l.positive)
          throw std::runtime_error("rpg rule with negative literal: " + r.name);
      detail::apply_rule(sym, u, r, s, by_type, true);
    }
  } while (!(prev == s));
}

}  // namespace exo

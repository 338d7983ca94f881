#pragma once

// Planning over a process model: a relaxed planning graph heuristic and A*.
//
// The heuristic relaxes away delete effects and delays. Layer 0 is the atom
// set of the evaluated state (pending events are ignored); each later layer
// applies every ground process whose start+overall conditions are reached and
// closes the layer under the positive derived rules. A relaxed plan is then
// extracted backwards: derived subgoals expand into their recorded rule body,
// base subgoals select their first achiever, and the heuristic value is the
// number of distinct endogenous processes selected. Exogenous processes are
// free: the world runs them on its own.
//
// A* searches over big steps in expected-delay mode. Commands cost 1 each,
// waiting (NoOp) included. A search node is identified by its atom set plus
// the multiset of (pending process, remaining time) so equivalent futures
// reached at different absolute times collapse.

#include <chrono>
#include <cstdint>
#include <limits>
#include <queue>
#include <set>
#include <unordered_map>
#include <utility>
#include <vector>

#include "exo/derived.hpp"
#include "exo/world.hpp"

namespace exo {

constexpr int kCostInf = std::numeric_limits<int>::max();

namespace detail {

struct Rpg {
  std::vector<int> first_layer;              // atom -> layer, -1 if never
  std::vector<int> achiever;                 // atom -> process index, -1
  std::vector<std::vector<AtomId>> witness;  // atom -> derived rule body
  int layers = 0;
  bool reached = false;
};

// Positive-rule closure of F, recording for each new head atom the body atoms
// that derived it. Rules flagged use_in_rpg only.
inline void rpg_derive(const World& w, AbstractState& F, int layer, Rpg& rpg) {
  if (!w.rules || w.rules->empty()) return;
  const Symbols& sym = *w.sym;
  const TaskUniverse& u = *w.universe;
  std::vector<std::vector<ObjectId>> by_type(sym.types.size());
  for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
    by_type[sym.objects[o].type].push_back(o);

  bool grew = true;
  while (grew) {
    grew = false;
    for (const DerivedPredicateRule& r : w.rules->rules) {
      if (!r.use_in_rpg) continue;
      for (const DerivedLiteral& l : r.body)
        if (!l.positive)
          throw std::runtime_error("rpg rule with negative literal: " + r.name);
      // positive-only rules have no universal vars: enumerate them all
      std::vector<ObjectId> binding(r.vars.size(), -1);
      std::vector<size_t> idx(r.vars.size(), 0);
      bool feasible = true;
      for (const Variable& v : r.vars)
        if (by_type[v.type].empty()) feasible = false;
      if (!feasible) continue;
      while (true) {
        for (size_t k = 0; k < r.vars.size(); ++k)
          binding[k] = by_type[r.vars[k].type][idx[k]];
        bool ok = true;
        std::vector<AtomId> body_ids;
        for (const DerivedLiteral& l : r.body) {
          GroundAtom g;
          g.pred = l.pred;
          for (int v : l.args) g.args.push_back(binding[v]);
          if (!u.contains(g) || !F.test(u.id_of(g))) {
            ok = false;
            break;
          }
          body_ids.push_back(u.id_of(g));
        }
        if (ok) {
          GroundAtom h;
          h.pred = r.head;
          for (int v : r.head_args) h.args.push_back(binding[v]);
          if (u.contains(h)) {
            AtomId hid = u.id_of(h);
            if (!F.test(hid)) {
              F.set(hid);
              rpg.first_layer[hid] = layer;
              rpg.witness[hid] = body_ids;
              grew = true;
            }
          }
        }
        size_t k = 0;
        for (; k < r.vars.size(); ++k) {
          if (++idx[k] < by_type[r.vars[k].type].size()) break;
          idx[k] = 0;
        }
        if (r.vars.empty() || k == r.vars.size()) break;
      }
    }
  }
}

inline Rpg build_rpg(const World& w, const AbstractState& s,
                     const std::vector<AtomId>& goal) {
  const Grounding& g = *w.grounding;
  int n = w.universe->size();
  Rpg rpg;
  rpg.first_layer.assign(n, -1);
  rpg.achiever.assign(n, -1);
  rpg.witness.assign(n, {});

  AbstractState F = s;
  for (AtomId a : F.to_ids()) rpg.first_layer[a] = 0;
  rpg_derive(w, F, 0, rpg);

  auto goal_in = [&](const AbstractState& f) {
    for (AtomId a : goal)
      if (!f.test(a)) return false;
    return true;
  };

  std::vector<char> applied(g.processes.size(), 0);
  int layer = 0;
  rpg.reached = goal_in(F);
  while (!rpg.reached) {
    ++layer;
    bool grew = false;
    AbstractState next = F;  // preconditions check against the previous layer
    for (size_t pi = 0; pi < g.processes.size(); ++pi) {
      if (applied[pi]) continue;
      const GroundProcess& gp = g.processes[pi];
      if (!cond_holds(gp.cond_start, F) || !cond_holds(gp.cond_overall, F))
        continue;
      applied[pi] = 1;
      for (AtomId a : gp.add_eff)
        if (!next.test(a)) {
          next.set(a);
          rpg.first_layer[a] = layer;
          rpg.achiever[a] = (int)pi;
          grew = true;
        }
    }
    if (!grew) break;  // fixed point without the goal
    rpg_derive(w, next, layer, rpg);
    F = next;
    rpg.reached = goal_in(F);
    rpg.layers = layer;
  }
  return rpg;
}

inline int extract_ff(const World& w, const Rpg& rpg,
                      const std::vector<AtomId>& goal) {
  if (!rpg.reached) return kCostInf;
  const Grounding& g = *w.grounding;
  int L = rpg.layers;
  std::vector<std::vector<AtomId>> need(L + 1);
  for (AtomId a : goal) need[rpg.first_layer[a]].push_back(a);
  std::vector<char> done(rpg.first_layer.size(), 0);
  std::set<int> selected;
  for (int l = L; l >= 1; --l) {
    std::vector<AtomId> work = std::move(need[l]);
    while (!work.empty()) {
      AtomId a = work.back();
      work.pop_back();
      if (done[a]) continue;
      done[a] = 1;
      if (!rpg.witness[a].empty()) {
        for (AtomId b : rpg.witness[a]) {
          int fl = rpg.first_layer[b];
          if (fl == l)
            work.push_back(b);  // derived in the same layer's closure
          else
            need[fl].push_back(b);
        }
      } else {
        int pi = rpg.achiever[a];
        if (pi < 0) continue;  // defensive; base atoms at l >= 1 have one
        selected.insert(pi);
        const GroundProcess& gp = g.processes[pi];
        for (AtomId pre : gp.cond_start) need[rpg.first_layer[pre]].push_back(pre);
        for (AtomId pre : gp.cond_overall)
          need[rpg.first_layer[pre]].push_back(pre);
      }
    }
  }
  int h = 0;
  for (int pi : selected)
    if (g.model->schemas[g.processes[pi].schema].endogenous) ++h;
  return h;
}

}  // namespace detail

inline int ff_heuristic(const World& w, const AbstractState& s,
                        const std::vector<AtomId>& goal) {
  detail::Rpg rpg = detail::build_rpg(w, s, goal);
  return detail::extract_ff(w, rpg, goal);
}

struct PlanBudget {
  double max_seconds = 60.0;
  long long max_expansions = 1000000;
  int k_max = 300;  // small-step cap per big step
};

enum class PlanStatus { kFound, kUnreachable, kTimeout };

struct PlanResult {
  PlanStatus status = PlanStatus::kUnreachable;
  std::vector<StepCommand> commands;
  long long expansions = 0;
  long long generated = 0;
  int h0 = -1;
  double seconds = 0.0;
};

namespace detail {

struct NodeKey {
  std::vector<uint64_t> bits;
  std::vector<std::pair<int, int>> sig;  // (process, t_end - t), sorted

  bool operator==(const NodeKey& o) const {
    return bits == o.bits && sig == o.sig;
  }
};

struct NodeKeyHash {
  size_t operator()(const NodeKey& k) const {
    uint64_t h = 1469598103934665603ull;
    auto mix = [&](uint64_t v) {
      h ^= v;
      h *= 1099511628211ull;
    };
    for (uint64_t wbits : k.bits) mix(wbits);
    for (auto [p, r] : k.sig) mix((uint64_t(uint32_t(p)) << 32) | uint32_t(r));
    return (size_t)h;
  }
};

inline NodeKey node_key(const WorldState& ws) {
  NodeKey k;
  k.bits = ws.atoms.bits;
  for (const ScheduledEvent& ev : ws.queue)
    k.sig.emplace_back(ev.process, ev.t_end - ws.t);
  std::sort(k.sig.begin(), k.sig.end());
  return k;
}

}  // namespace detail

inline PlanResult astar_plan(const World& w, const WorldState& start,
                             const std::vector<AtomId>& goal,
                             const PlanBudget& budget = {}) {
  using clock = std::chrono::steady_clock;
  auto t0 = clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(clock::now() - t0).count();
  };

  const Grounding& grounding = *w.grounding;
  const ProcessModel& model = *grounding.model;

  PlanResult res;
  res.h0 = ff_heuristic(w, start.atoms, goal);
  if (res.h0 == kCostInf) {
    res.status = PlanStatus::kUnreachable;
    res.seconds = elapsed();
    return res;
  }

  struct Node {
    WorldState ws;
    int parent = -1;
    StepCommand cmd;
    int g = 0;
  };
  std::vector<Node> arena;
  arena.push_back({start, -1, StepCommand::idle(), 0});

  // heap entries: (f, h, insertion order, node index)
  using Entry = std::tuple<long long, int, long long, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<Entry>> open;
  long long order = 0;
  open.emplace((long long)res.h0, res.h0, order++, 0);

  std::unordered_map<detail::NodeKey, int, detail::NodeKeyHash> best_g;
  best_g[detail::node_key(start)] = 0;

  auto goal_in = [&](const AbstractState& s) {
    for (AtomId a : goal)
      if (!s.test(a)) return false;
    return true;
  };

  // Waiting is issued through the model's no-op schema so activation matches
  // its option signature (e.g. NoOp(?robot)); models without one get the bare
  // zero-argument form.
  std::pair<std::string, std::vector<ObjectId>> wait_cmd{"NoOp", {}};
  for (const GroundProcess& gp : grounding.processes) {
    const ProcessSchema& schema = model.schemas[gp.schema];
    if (!schema.is_noop() || schema.option.skill != "NoOp") continue;
    std::vector<ObjectId> args;
    for (int k : schema.option.args) args.push_back(gp.binding[k]);
    wait_cmd = {schema.option.skill, std::move(args)};
    break;
  }

  RandomSource dummy_rng(0);  // expected mode never draws
  while (!open.empty()) {
    if (res.expansions >= budget.max_expansions ||
        ((res.expansions & 0xff) == 0 && elapsed() > budget.max_seconds)) {
      res.status = PlanStatus::kTimeout;
      res.seconds = elapsed();
      return res;
    }
    auto [f, h, ord, ni] = open.top();
    open.pop();
    Node node = arena[ni];  // copy: arena may grow below
    {
      auto it = best_g.find(detail::node_key(node.ws));
      if (it != best_g.end() && it->second < node.g) continue;  // stale
    }
    if (goal_in(node.ws.atoms)) {
      std::vector<StepCommand> cmds;
      for (int cur = ni; cur > 0; cur = arena[cur].parent)
        cmds.push_back(arena[cur].cmd);
      std::reverse(cmds.begin(), cmds.end());
      res.status = PlanStatus::kFound;
      res.commands = std::move(cmds);
      res.seconds = elapsed();
      return res;
    }
    res.expansions++;

    // distinct applicable commands
    std::set<std::pair<std::string, std::vector<ObjectId>>> cmds;
    for (size_t pi = 0; pi < grounding.processes.size(); ++pi) {
      const GroundProcess& gp = grounding.processes[pi];
      const ProcessSchema& schema = model.schemas[gp.schema];
      if (!schema.endogenous || schema.is_noop()) continue;
      if (!cond_holds(gp.cond_start, node.ws.atoms)) continue;
      std::vector<ObjectId> args;
      for (int k : schema.option.args) args.push_back(gp.binding[k]);
      cmds.insert({schema.option.skill, std::move(args)});
    }
    bool waiting_useful = !node.ws.queue.empty();
    if (!waiting_useful) {
      for (size_t pi = 0; pi < grounding.processes.size() && !waiting_useful;
           ++pi) {
        const GroundProcess& gp = grounding.processes[pi];
        if (!model.schemas[gp.schema].endogenous &&
            cond_holds(gp.cond_start, node.ws.atoms))
          waiting_useful = true;
      }
    }
    if (waiting_useful) cmds.insert(wait_cmd);

    for (const auto& [skill, args] : cmds) {
      StepCommand cmd = StepCommand::make(skill, args);
      WorldState succ = node.ws;
      BigStepResult r = big_step(w, succ, cmd, dummy_rng, StepMode::kExpected,
                                 budget.k_max);
      if (!r.completed) continue;
      res.generated++;
      int g2 = node.g + 1;
      detail::NodeKey key = detail::node_key(succ);
      auto it = best_g.find(key);
      if (it != best_g.end() && it->second <= g2) continue;
      int h2 = ff_heuristic(w, succ.atoms, goal);
      if (h2 == kCostInf) continue;
      best_g[key] = g2;
      arena.push_back({std::move(succ), ni, cmd, g2});
      open.emplace((long long)g2 + h2, h2, order++, (int)arena.size() - 1);
    }
  }
  res.status = PlanStatus::kUnreachable;
  res.seconds = elapsed();
  return res;
}

}  // namespace exo

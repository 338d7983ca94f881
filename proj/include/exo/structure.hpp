#pragma once
// Learns exogenous process structure from recorded trajectories. The known
// endogenous model explains the state changes caused by issued commands;
// whatever residue remains is clustered by effect shape, lifted into a shared
// condition universe per cluster, and scored condition subsets become new
// exogenous schemas. A final joint fit re-estimates every process parameter
// together with the frame strength.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "exo/likelihood.hpp"
#include "exo/process.hpp"
#include "exo/symbols.hpp"
#include "exo/trajectory.hpp"

namespace exo {

// ---------------------------------------------------------------------------
// residue extraction

struct ResidueFlip {
  int traj = 0;
  int t = 0;          // flip tick: states[t] differs from states[t-1]
  AtomId atom = -1;
  bool add = true;    // direction of the flip
  int seg_start = 0;  // previous change tick in this trajectory (0 if none)
};

// Predicates whose atoms change anywhere in the data. Grounding against an
// initial state treats everything else as static.
inline std::vector<PredId> observed_dynamic_preds(
    const TaskUniverse& uni, const std::vector<Trajectory>& trajs) {
  std::vector<bool> dyn(uni.sym->preds.size(), false);
  for (const Trajectory& tr : trajs)
    for (size_t t = 1; t < tr.states.size(); ++t)
      for (AtomId j = 0; j < (AtomId)uni.size(); ++j)
        if (tr.states[t].test(j) != tr.states[t - 1].test(j))
          dyn[uni.atoms[j].pred] = true;
  std::vector<PredId> out;
  for (PredId p = 0; p < (PredId)dyn.size(); ++p)
    if (dyn[p]) out.push_back(p);
  return out;
}

namespace structdetail {

// Ground processes of endogenous schemas that a command activates: the skill
// name and arguments match the option spec and the start conditions hold in
// the post-activation state.
inline std::vector<int> activated_groundings(const Grounding& g,
                                             const ProcessModel& model,
                                             const TrajCommand& cmd,
                                             const AbstractState& s_post) {
  std::vector<int> out;
  for (int si = 0; si < (int)model.schemas.size(); ++si) {
    const ProcessSchema& sc = model.schemas[si];
    if (!sc.endogenous || sc.option.skill != cmd.skill) continue;
    if (sc.option.args.size() != cmd.args.size()) continue;
    for (int pi : g.by_schema[si]) {
      const GroundProcess& gp = g.processes[pi];
      bool match = true;
      for (size_t k = 0; k < cmd.args.size(); ++k)
        if (gp.binding[sc.option.args[k]] != cmd.args[k]) {
          match = false;
          break;
        }
      if (match && cond_holds(gp.cond_start, s_post)) out.push_back(pi);
    }
  }
  return out;
}

}  // namespace structdetail

// Flips the endogenous model cannot account for. A non-NoOp command explains,
// anywhere inside its big-step window, flips matching its activated ground
// effects plus any flip of a predicate it declares as an ignore effect. NoOp
// windows explain nothing, including the NoOp's own ignore list, so waiting
// never hides exogenous evidence. Derived predicates are recomputed from base
// atoms and never count as residue.
inline std::vector<ResidueFlip> segment_residue(
    const Symbols& sym, const TaskUniverse& uni,
    const std::vector<Trajectory>& trajs, const ProcessModel& endo,
    const std::vector<PredId>& derived_preds,
    const std::vector<PredId>& extra_dynamic) {
  std::vector<bool> is_derived(sym.preds.size(), false);
  for (PredId p : derived_preds)
    if (p >= 0 && p < (PredId)is_derived.size()) is_derived[p] = true;

  std::vector<ResidueFlip> out;
  for (int ti = 0; ti < (int)trajs.size(); ++ti) {
    const Trajectory& tr = trajs[ti];
    if (tr.states.size() < 2) continue;
    int T = tr.horizon();
    Grounding g = ground_all(sym, uni, endo, tr.states[0], extra_dynamic);

    struct Window {
      int start = 0, end = 0;  // explains flips at ticks (start, end]
      AbstractState added, deleted;
      std::vector<bool> ignore;
      bool active = false;
    };
    std::vector<Window> wins;
    for (int ci = 0; ci < (int)tr.commands.size(); ++ci) {
      const TrajCommand& cmd = tr.commands[ci];
      Window w;
      w.start = cmd.t;
      w.end = ci + 1 < (int)tr.commands.size() ? tr.commands[ci + 1].t : T;
      w.added = AbstractState((int)uni.size());
      w.deleted = AbstractState((int)uni.size());
      w.ignore.assign(sym.preds.size(), false);
      if (cmd.ok && cmd.skill != "NoOp" && cmd.t + 1 < (int)tr.states.size()) {
        std::vector<int> acts = structdetail::activated_groundings(
            g, endo, cmd, tr.states[cmd.t + 1]);
        for (int pi : acts) {
          const GroundProcess& gp = g.processes[pi];
          for (AtomId a : gp.add_eff) w.added.set(a);
          for (AtomId a : gp.del_eff) w.deleted.set(a);
          for (PredId p : endo.schemas[gp.schema].ignore_effects)
            if (p >= 0 && p < (PredId)w.ignore.size()) w.ignore[p] = true;
        }
        w.active = !acts.empty();
      }
      wins.push_back(std::move(w));
    }

    int last_change = 0;
    size_t wi = 0;
    for (int t = 1; t <= T; ++t) {
      while (wi + 1 < wins.size() && wins[wi + 1].start < t) ++wi;
      const Window* w = nullptr;
      if (wi < wins.size() && wins[wi].start < t && t <= wins[wi].end)
        w = &wins[wi];
      bool changed = false;
      for (AtomId j = 0; j < (AtomId)uni.size(); ++j) {
        bool was = tr.states[t - 1].test(j);
        bool now = tr.states[t].test(j);
        if (was == now) continue;
        changed = true;
        PredId p = uni.atoms[j].pred;
        if (is_derived[p]) continue;
        bool explained = false;
        if (w && w->active) {
          if (w->ignore[p]) explained = true;
          else if (now && w->added.test(j)) explained = true;
          else if (!now && w->deleted.test(j)) explained = true;
        }
        if (!explained) out.push_back({ti, t, j, now, last_change});
      }
      if (changed) last_change = t;
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// clustering by effect shape

struct Cluster {
  PredId pred = -1;
  bool add = true;
  std::vector<int> pattern;  // argument equality classes, P(a, b) -> [0, 1]
  std::vector<ResidueFlip> obs;
};

inline std::vector<int> equality_pattern(const GroundAtom& a) {
  std::vector<int> pat(a.args.size());
  for (size_t i = 0; i < a.args.size(); ++i) {
    pat[i] = (int)i;
    for (size_t j = 0; j < i; ++j)
      if (a.args[j] == a.args[i]) {
        pat[i] = (int)j;
        break;
      }
  }
  return pat;
}

// Clusters in canonical order: predicate name, adds before deletes, pattern.
inline std::vector<Cluster> cluster_residue(
    const TaskUniverse& uni, const std::vector<ResidueFlip>& flips) {
  std::map<std::tuple<std::string, bool, std::vector<int>>, Cluster> by_key;
  for (const ResidueFlip& f : flips) {
    const GroundAtom& ga = uni.atoms[f.atom];
    std::vector<int> pat = equality_pattern(ga);
    auto key = std::make_tuple(uni.sym->preds[ga.pred].name, !f.add, pat);
    Cluster& c = by_key[key];
    c.pred = ga.pred;
    c.add = f.add;
    c.pattern = pat;
    c.obs.push_back(f);
  }
  std::vector<Cluster> out;
  out.reserve(by_key.size());
  for (auto& kv : by_key) out.push_back(std::move(kv.second));
  return out;
}

// ---------------------------------------------------------------------------
// lifting and cross-observation intersection

struct LiftedCluster {
  Cluster cluster;
  std::vector<Variable> vars;     // ?x0.. over the reference objects
  LiftedAtom effect;              // over var indices
  std::vector<LiftedAtom> atoms;  // surviving condition universe, sorted
  double mean_wait = 1.0;         // mean stable-segment length before a flip
};

namespace structdetail {

inline bool lifted_atom_before(const Symbols& sym, const LiftedAtom& a,
                               const LiftedAtom& b) {
  const std::string& an = sym.preds[a.pred].name;
  const std::string& bn = sym.preds[b.pred].name;
  if (an != bn) return an < bn;
  return a.args < b.args;
}

// Distance of each atom from the effect variables in the co-occurrence graph
// over variables; atoms touching an effect variable rank first.
inline std::vector<int> atom_hops(const std::vector<LiftedAtom>& atoms,
                                  const LiftedAtom& effect, int n_vars) {
  const int kFar = std::numeric_limits<int>::max() / 4;
  std::vector<int> var_hop(n_vars, kFar);
  for (int v : effect.args)
    if (v >= 0 && v < n_vars) var_hop[v] = 0;
  bool moved = true;
  while (moved) {
    moved = false;
    for (const LiftedAtom& a : atoms) {
      int m = kFar;
      for (int v : a.args) m = std::min(m, var_hop[v]);
      if (m >= kFar) continue;
      for (int v : a.args)
        if (var_hop[v] > m + 1) {
          var_hop[v] = m + 1;
          moved = true;
        }
    }
  }
  std::vector<int> hops(atoms.size(), kFar);
  for (size_t i = 0; i < atoms.size(); ++i)
    for (int v : atoms[i].args) hops[i] = std::min(hops[i], var_hop[v]);
  return hops;
}

// One observation's best injective variable binding, found by beam search
// over the condition universe in relevance order. Returns per-atom
// satisfaction flags under the best binding found.
inline std::vector<uint8_t> beam_match(
    const Symbols& sym, const TaskUniverse& uni,
    const std::vector<LiftedAtom>& atoms, const std::vector<Variable>& vars,
    const LiftedAtom& effect, const GroundAtom& obs_effect,
    const AbstractState& pre, int beam_width, int ext_cap) {
  int n_vars = (int)vars.size();
  int n_objs = (int)sym.objects.size();

  // True ground atoms of the pre-state, indexed by predicate.
  std::vector<std::vector<const GroundAtom*>> by_pred(sym.preds.size());
  for (AtomId j : pre.to_ids()) by_pred[uni.atoms[j].pred].push_back(&uni.atoms[j]);

  struct Item {
    std::vector<ObjectId> bind;
    std::vector<uint8_t> used;
    std::vector<uint8_t> sat;
    int score = 0;
    long serial = 0;
  };
  long next_serial = 0;

  Item root;
  root.bind.assign(n_vars, -1);
  root.used.assign(n_objs, 0);
  root.sat.assign(atoms.size(), 0);
  root.serial = next_serial++;
  for (size_t i = 0; i < effect.args.size(); ++i) {
    int v = effect.args[i];
    ObjectId o = obs_effect.args[i];
    if (root.bind[v] == -1) {
      root.bind[v] = o;
      root.used[o] = 1;
    }
  }

  std::vector<int> hops = atom_hops(atoms, effect, n_vars);
  std::vector<int> order(atoms.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = (int)i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return hops[a] < hops[b]; });

  std::vector<Item> beam;
  beam.push_back(std::move(root));
  for (int ai : order) {
    const LiftedAtom& la = atoms[ai];
    std::vector<Item> next;
    for (Item& it : beam) {
      bool all_bound = true;
      for (int v : la.args)
        if (it.bind[v] == -1) {
          all_bound = false;
          break;
        }
      if (all_bound) {
        GroundAtom ga;
        ga.pred = la.pred;
        for (int v : la.args) ga.args.push_back(it.bind[v]);
        if (uni.contains(ga) && pre.test(uni.id_of(ga))) {
          it.sat[ai] = 1;
          ++it.score;
        }
        next.push_back(std::move(it));
        continue;
      }
      // Branch: skip the atom, or extend the binding with a matching ground
      // atom from the pre-state.
      int exts = 0;
      for (const GroundAtom* ga : by_pred[la.pred]) {
        if (exts >= ext_cap) break;
        bool okb = true;
        std::vector<std::pair<int, ObjectId>> new_binds;
        for (size_t k = 0; k < la.args.size(); ++k) {
          int v = la.args[k];
          ObjectId o = ga->args[k];
          if (it.bind[v] != -1) {
            if (it.bind[v] != o) okb = false;
          } else {
            bool pending = false;
            for (auto& nb : new_binds)
              if (nb.first == v) {
                pending = true;
                if (nb.second != o) okb = false;
              }
            if (!pending) {
              if (it.used[o]) okb = false;
              for (auto& nb : new_binds)
                if (nb.second == o) okb = false;
              if (okb) new_binds.push_back({v, o});
            }
          }
          if (!okb) break;
        }
        if (!okb) continue;
        Item ext = it;
        for (auto& nb : new_binds) {
          ext.bind[nb.first] = nb.second;
          ext.used[nb.second] = 1;
        }
        ext.sat[ai] = 1;
        ++ext.score;
        ext.serial = next_serial++;
        next.push_back(std::move(ext));
        ++exts;
      }
      next.push_back(std::move(it));  // the skip branch keeps its serial
    }
    std::stable_sort(next.begin(), next.end(), [](const Item& a, const Item& b) {
      if (a.score != b.score) return a.score > b.score;
      return a.serial < b.serial;
    });
    if ((int)next.size() > beam_width) next.resize(beam_width);
    beam = std::move(next);
  }

  const Item* best = &beam.front();
  return best->sat;
}

}  // namespace structdetail

// Lift the first observation over all its objects, then intersect the
// condition universe across the remaining observations under the best
// injective renaming found for each. Variables are numbered over the
// reference objects sorted by type name then object name, so the numbering
// survives pruning.
inline LiftedCluster intersect_cluster(const Symbols& sym,
                                       const TaskUniverse& uni,
                                       const std::vector<Trajectory>& trajs,
                                       const Cluster& cluster,
                                       int beam_width = 64, int ext_cap = 16) {
  LiftedCluster lc;
  lc.cluster = cluster;

  double wait_sum = 0;
  for (const ResidueFlip& f : cluster.obs)
    wait_sum += std::max(1, f.t - f.seg_start);
  lc.mean_wait = cluster.obs.empty() ? 1.0 : wait_sum / cluster.obs.size();

  if (cluster.obs.empty()) return lc;
  const ResidueFlip& ref = cluster.obs.front();
  const AbstractState& pre = trajs[ref.traj].states[ref.t - 1];
  const GroundAtom& ref_eff = uni.atoms[ref.atom];

  // Reference objects: everything in the effect or the pre-state, ordered by
  // (type name, object name).
  std::set<ObjectId> objs(ref_eff.args.begin(), ref_eff.args.end());
  for (AtomId j : pre.to_ids())
    for (ObjectId o : uni.atoms[j].args) objs.insert(o);
  std::vector<ObjectId> ordered(objs.begin(), objs.end());
  std::sort(ordered.begin(), ordered.end(), [&](ObjectId a, ObjectId b) {
    const std::string& ta = sym.types[sym.objects[a].type].name;
    const std::string& tb = sym.types[sym.objects[b].type].name;
    if (ta != tb) return ta < tb;
    return sym.objects[a].name < sym.objects[b].name;
  });
  std::vector<int> var_of(sym.objects.size(), -1);
  for (int i = 0; i < (int)ordered.size(); ++i) {
    var_of[ordered[i]] = i;
    Variable v;
    v.name = "?x" + std::to_string(i);
    v.type = sym.objects[ordered[i]].type;
    lc.vars.push_back(v);
  }

  lc.effect.pred = ref_eff.pred;
  for (ObjectId o : ref_eff.args) lc.effect.args.push_back(var_of[o]);

  for (AtomId j : pre.to_ids()) {
    const GroundAtom& ga = uni.atoms[j];
    LiftedAtom la;
    la.pred = ga.pred;
    for (ObjectId o : ga.args) la.args.push_back(var_of[o]);
    lc.atoms.push_back(la);
  }
  std::sort(lc.atoms.begin(), lc.atoms.end(),
            [&](const LiftedAtom& a, const LiftedAtom& b) {
              return structdetail::lifted_atom_before(sym, a, b);
            });

  for (size_t oi = 1; oi < cluster.obs.size(); ++oi) {
    if (lc.atoms.empty()) break;
    const ResidueFlip& f = cluster.obs[oi];
    std::vector<uint8_t> sat = structdetail::beam_match(
        sym, uni, lc.atoms, lc.vars, lc.effect, uni.atoms[f.atom],
        trajs[f.traj].states[f.t - 1], beam_width, ext_cap);
    std::vector<LiftedAtom> kept;
    for (size_t i = 0; i < lc.atoms.size(); ++i)
      if (sat[i]) kept.push_back(lc.atoms[i]);
    lc.atoms = std::move(kept);
  }
  return lc;
}

// ---------------------------------------------------------------------------
// condition candidates

// Candidate condition sets over a lifted cluster, as sorted index lists into
// its condition universe. Atoms are ranked by co-occurrence distance to the
// effect variables; candidates are the ranked prefixes plus small subsets of
// the top-ranked atoms, deduplicated and capped.
inline std::vector<std::vector<int>> heuristic_condition_sets(
    const Symbols& sym, const LiftedCluster& lc, int max_candidates = 32,
    int top_k = 8) {
  std::vector<std::vector<int>> out;
  int n = (int)lc.atoms.size();
  if (n == 0) return out;
  std::vector<int> hops =
      structdetail::atom_hops(lc.atoms, lc.effect, (int)lc.vars.size());
  std::vector<int> rank(n);
  for (int i = 0; i < n; ++i) rank[i] = i;
  std::stable_sort(rank.begin(), rank.end(),
                   [&](int a, int b) { return hops[a] < hops[b]; });

  std::set<std::vector<int>> seen;
  auto push = [&](std::vector<int> s) {
    std::sort(s.begin(), s.end());
    if ((int)out.size() < max_candidates && seen.insert(s).second)
      out.push_back(std::move(s));
  };

  std::vector<int> prefix;
  for (int i = 0; i < n; ++i) {
    prefix.push_back(rank[i]);
    push(prefix);
  }
  int k = std::min(top_k, n);
  std::vector<int> combo;
  std::function<void(int, int)> gen = [&](int start, int left) {
    if ((int)out.size() >= max_candidates) return;
    if (left == 0) {
      push(combo);
      return;
    }
    for (int i = start; i < k; ++i) {
      combo.push_back(rank[i]);
      gen(i + 1, left - 1);
      combo.pop_back();
    }
  };
  for (int size = 1; size <= 4 && size <= k; ++size) gen(0, size);
  return out;
}

// Build an exogenous schema from a chosen condition subset. Parameters are
// the variables used by the effect and the conditions, keeping their
// reference numbering; overall conditions duplicate the start conditions.
inline ProcessSchema candidate_schema(const Symbols& sym,
                                      const LiftedCluster& lc,
                                      const std::vector<int>& subset,
                                      const std::string& name) {
  std::set<int> used(lc.effect.args.begin(), lc.effect.args.end());
  for (int ai : subset)
    for (int v : lc.atoms[ai].args) used.insert(v);
  std::vector<int> var_list(used.begin(), used.end());
  std::vector<int> compact(lc.vars.size(), -1);
  ProcessSchema s;
  s.name = name;
  s.endogenous = false;
  for (int i = 0; i < (int)var_list.size(); ++i) {
    compact[var_list[i]] = i;
    s.params.push_back(lc.vars[var_list[i]]);
  }
  auto remap = [&](const LiftedAtom& a) {
    LiftedAtom r;
    r.pred = a.pred;
    for (int v : a.args) r.args.push_back(compact[v]);
    return r;
  };
  for (int ai : subset) s.cond_start.push_back(remap(lc.atoms[ai]));
  std::sort(s.cond_start.begin(), s.cond_start.end(),
            [&](const LiftedAtom& a, const LiftedAtom& b) {
              return structdetail::lifted_atom_before(sym, a, b);
            });
  s.cond_overall = s.cond_start;
  if (lc.cluster.add) s.add_eff.push_back(remap(lc.effect));
  else s.del_eff.push_back(remap(lc.effect));
  s.log_strength = 1.0;
  double m = std::max(1.0, lc.mean_wait);
  s.delay = DelayDistribution::gaussian(m, std::max(0.5, m / 2));
  return s;
}

// ---------------------------------------------------------------------------
// likelihood instances from trajectories

// Trigger times of one ground process against an observed state sequence:
// rising edges of its start conditions, including t = 0 when they hold
// initially. Matches how the simulator schedules exogenous processes.
inline std::vector<int> rising_edges(const GroundProcess& gp,
                                     const std::vector<AbstractState>& states) {
  std::vector<int> out;
  int T = (int)states.size() - 1;
  for (int t = 0; t < T; ++t) {
    if (!cond_holds(gp.cond_start, states[t])) continue;
    if (t == 0 || !cond_holds(gp.cond_start, states[t - 1])) out.push_back(t);
  }
  return out;
}

namespace structdetail {

struct InstanceBuilder {
  LikelihoodInstance inst;
  std::map<int, int> local;  // grounding index -> inst.procs index

  int use(const Grounding& g, int pi) {
    auto it = local.find(pi);
    if (it != local.end()) return it->second;
    const GroundProcess& gp = g.processes[pi];
    LikelihoodProcess p;
    p.cond_overall = std::vector<int>(gp.cond_overall.begin(),
                                      gp.cond_overall.end());
    p.add_eff = std::vector<int>(gp.add_eff.begin(), gp.add_eff.end());
    p.del_eff = std::vector<int>(gp.del_eff.begin(), gp.del_eff.end());
    p.schema = gp.schema;
    int idx = (int)inst.procs.size();
    inst.procs.push_back(std::move(p));
    local[pi] = idx;
    return idx;
  }
};

}  // namespace structdetail

// Full-universe likelihood instance for one trajectory: endogenous triggers
// reconstructed from successful commands (skipping NoOp), exogenous triggers
// from rising edges of every grounding.
inline LikelihoodInstance build_instance(const Symbols& sym,
                                         const TaskUniverse& uni,
                                         const Trajectory& tr,
                                         const ProcessModel& model,
                                         const Grounding& g) {
  structdetail::InstanceBuilder b;
  b.inst.J = (int)uni.size();
  b.inst.states = tr.states;
  int T = tr.horizon();
  for (const TrajCommand& cmd : tr.commands) {
    if (!cmd.ok || cmd.skill == "NoOp") continue;
    int t_r = cmd.t + 1;
    if (t_r >= T) continue;
    std::vector<int> acts = structdetail::activated_groundings(
        g, model, cmd, tr.states[cmd.t + 1]);
    for (int pi : acts) b.inst.triggers.push_back({b.use(g, pi), t_r});
  }
  for (int si = 0; si < (int)model.schemas.size(); ++si) {
    if (model.schemas[si].endogenous) continue;
    for (int pi : g.by_schema[si])
      for (int t : rising_edges(g.processes[pi], tr.states))
        b.inst.triggers.push_back({b.use(g, pi), t});
  }
  return std::move(b.inst);
}

// ---------------------------------------------------------------------------
// condition selection

struct ClusterReport {
  std::string pred;
  bool add = true;
  int n_obs = 0;
  int n_universe = 0;  // intersection size going into selection
  int n_candidates = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  bool chosen = false;
  std::string schema_name;
  std::vector<std::string> conditions;
};

struct StructureOptions {
  double lambda = 0.5;  // description-length weight per condition atom
  int select_iters = 300;
  int refit_iters = 500;
  int h_pmf = 100;
  int beam_width = 64;
  int ext_cap = 16;
  int max_candidates = 32;
  int top_rank = 8;
  double max_groundings = 1e5;
  std::vector<PredId> derived_preds;
  // Optional override for candidate generation; empty result falls back to
  // the built-in heuristic.
  std::function<std::vector<std::vector<int>>(const Symbols&,
                                              const LiftedCluster&, int)>
      proposer;
};

struct LearnResult {
  ProcessModel model;
  bool ok = true;
  std::string note;
  std::vector<ClusterReport> clusters;
  double refit_elbo = 0;
};

namespace structdetail {

struct ScoredCandidate {
  double score = -std::numeric_limits<double>::infinity();
  int index = -1;
  ProcessSchema schema;
  SchemaParams fitted;
};

// Score one candidate schema across all trajectories: fit its strength,
// delay, and the frame strength jointly on the full atom universe, then
// subtract the frame-only optimum on the same cells (closed form in the
// stay fraction) and the description-length penalty. Positive scores mean
// the candidate's events buy back more likelihood than its conditions cost.
// Only the candidate itself rides in the model here; flips that the known
// endogenous processes cause hit candidate fit and null equally and cancel.
inline double score_candidate(const Symbols& sym, const TaskUniverse& uni,
                              const std::vector<Trajectory>& trajs,
                              const ProcessSchema& cand, double frame_W,
                              const std::vector<PredId>& dyn,
                              const StructureOptions& opt,
                              SchemaParams* fitted_out) {
  const double kNegInf = -std::numeric_limits<double>::infinity();
  double prod = 1;
  std::vector<int> per_type(sym.types.size(), 0);
  for (const auto& o : sym.objects) ++per_type[o.type];
  for (const Variable& v : cand.params) {
    prod *= std::max(1, per_type[v.type]);
    if (prod > opt.max_groundings) return kNegInf;
  }

  ProcessModel m1;
  m1.schemas.push_back(cand);
  m1.frame.log_strength = frame_W;

  std::vector<LikelihoodInstance> insts;
  long long cells = 0, eq = 0;
  int n_triggers = 0;
  for (const Trajectory& tr : trajs) {
    if (tr.states.size() < 2) continue;
    Grounding g = ground_all(sym, uni, m1, tr.states[0], dyn);
    LikelihoodInstance inst = build_instance(sym, uni, tr, m1, g);
    n_triggers += (int)inst.triggers.size();
    for (size_t t = 1; t < tr.states.size(); ++t) {
      const auto& a = tr.states[t - 1].bits;
      const auto& b = tr.states[t].bits;
      long long neq = 0;
      for (size_t w = 0; w < a.size(); ++w)
        neq += std::popcount(a[w] ^ b[w]);
      cells += inst.J;
      eq += inst.J - neq;
    }
    insts.push_back(std::move(inst));
  }
  if (insts.empty() || n_triggers == 0) return kNegInf;

  // frame-only optimum: WF* is the stay-fraction logit
  double null_elbo = 0;
  double wf_star = frame_W;
  if (eq > 0 && eq < cells) {
    wf_star = std::log((double)eq) - std::log((double)(cells - eq));
    null_elbo = (double)eq * wf_star -
                (double)cells * std::log(std::exp(wf_star) + 1.0);
  }

  LearnableParams lp;
  SchemaParams sp;
  sp.W = cand.log_strength;
  sp.delay = cand.delay;
  lp.schema.push_back(sp);
  lp.WF = wf_star;  // start the frame at the null optimum
  lp.fit_WF = true;

  FitOptions fo;
  fo.iters = opt.select_iters;
  fo.h_pmf = opt.h_pmf;
  std::vector<std::vector<ArrivalPosterior>> posts;
  FitResult fr = fit_params(insts, lp, posts, fo);

  if (fitted_out) *fitted_out = lp.schema[0];
  double penalty =
      opt.lambda * (double)(cand.cond_start.size() + cand.cond_overall.size());
  return fr.elbo - null_elbo - penalty;
}

}  // namespace structdetail

// ---------------------------------------------------------------------------
// top-level learning

inline LearnResult learn_structure(const Symbols& sym, const TaskUniverse& uni,
                                   const std::vector<Trajectory>& trajs,
                                   const ProcessModel& endo,
                                   const StructureOptions& opt = {}) {
  LearnResult res;
  res.model = endo;
  if (trajs.empty()) {
    res.ok = false;
    res.note = "no trajectories";
    return res;
  }

  std::vector<PredId> dyn = observed_dynamic_preds(uni, trajs);
  std::vector<PredId> dyn_all = dyn;
  for (PredId p : opt.derived_preds) dyn_all.push_back(p);
  std::sort(dyn_all.begin(), dyn_all.end());
  dyn_all.erase(std::unique(dyn_all.begin(), dyn_all.end()), dyn_all.end());

  std::vector<ResidueFlip> flips =
      segment_residue(sym, uni, trajs, endo, opt.derived_preds, dyn_all);
  std::vector<Cluster> clusters = cluster_residue(uni, flips);

  int op_index = 0;
  for (const Cluster& cluster : clusters) {
    ClusterReport rep;
    rep.pred = sym.preds[cluster.pred].name;
    rep.add = cluster.add;
    rep.n_obs = (int)cluster.obs.size();

    LiftedCluster lc =
        intersect_cluster(sym, uni, trajs, cluster, opt.beam_width, opt.ext_cap);
    rep.n_universe = (int)lc.atoms.size();

    std::vector<std::vector<int>> cands;
    if (opt.proposer) cands = opt.proposer(sym, lc, opt.max_candidates);
    if (cands.empty())
      cands = heuristic_condition_sets(sym, lc, opt.max_candidates,
                                       opt.top_rank);
    rep.n_candidates = (int)cands.size();

    std::string name = "Op" + std::to_string(op_index);
    structdetail::ScoredCandidate best;
    for (int ci = 0; ci < (int)cands.size(); ++ci) {
      ProcessSchema schema = candidate_schema(sym, lc, cands[ci], name);
      SchemaParams fitted;
      double score = structdetail::score_candidate(
          sym, uni, trajs, schema, endo.frame.log_strength, dyn_all, opt,
          &fitted);
      bool better = score > best.score;
      if (score == best.score && best.index >= 0) {
        if (cands[ci].size() < cands[best.index].size()) better = true;
        else if (cands[ci].size() == cands[best.index].size() &&
                 cands[ci] < cands[best.index])
          better = true;
      }
      if (better) {
        best.score = score;
        best.index = ci;
        best.schema = schema;
        best.fitted = fitted;
      }
    }
    rep.best_score = best.score;
    // keep the winner only if it beats keeping the frame alone
    if (best.index >= 0 && best.score > 0) {
      best.schema.log_strength = best.fitted.W;
      best.schema.delay = best.fitted.delay;
      res.model.schemas.push_back(best.schema);
      rep.chosen = true;
      rep.schema_name = name;
      for (const LiftedAtom& a : best.schema.cond_start) {
        std::string str = sym.preds[a.pred].name + "(";
        for (size_t i = 0; i < a.args.size(); ++i) {
          if (i) str += ", ";
          str += best.schema.params[a.args[i]].name;
        }
        rep.conditions.push_back(str + ")");
      }
      ++op_index;
    } else {
      res.ok = false;
      if (!res.note.empty()) res.note += "; ";
      res.note += "no viable conditions for cluster " + rep.pred +
                  (cluster.add ? "+" : "-");
    }
    res.clusters.push_back(std::move(rep));
  }

  // Joint refit of every process parameter plus the frame strength.
  std::vector<LikelihoodInstance> insts;
  for (const Trajectory& tr : trajs) {
    if (tr.states.size() < 2) continue;
    Grounding g = ground_all(sym, uni, res.model, tr.states[0], dyn_all);
    LikelihoodInstance inst = build_instance(sym, uni, tr, res.model, g);
    insts.push_back(std::move(inst));
  }
  if (!insts.empty()) {
    LearnableParams lp;
    for (const ProcessSchema& sc : res.model.schemas) {
      SchemaParams sp;
      sp.W = sc.log_strength;
      sp.delay = sc.delay;
      lp.schema.push_back(sp);
    }
    lp.WF = res.model.frame.log_strength;
    FitOptions fo;
    fo.iters = opt.refit_iters;
    fo.h_pmf = opt.h_pmf;
    std::vector<std::vector<ArrivalPosterior>> posts;
    FitResult fr = fit_params(insts, lp, posts, fo);
    res.refit_elbo = fr.elbo;
    for (int i = 0; i < (int)res.model.schemas.size(); ++i) {
      res.model.schemas[i].log_strength = lp.schema[i].W;
      res.model.schemas[i].delay = lp.schema[i].delay;
    }
    res.model.frame.log_strength = lp.WF;
  }
  return res;
}

// ---------------------------------------------------------------------------
// schema comparison, for checking recovered structure against a reference

namespace structdetail {

inline std::vector<LiftedAtom> remapped_sorted(const std::vector<LiftedAtom>& v,
                                               const std::vector<int>& perm) {
  std::vector<LiftedAtom> out;
  out.reserve(v.size());
  for (const LiftedAtom& a : v) {
    LiftedAtom r;
    r.pred = a.pred;
    for (int x : a.args) r.args.push_back(perm[x]);
    out.push_back(std::move(r));
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace structdetail

// True when two schemas over the same symbol table are identical up to a
// renaming of parameters. Delay and strength values are not compared.
inline bool schemas_equivalent(const ProcessSchema& a, const ProcessSchema& b) {
  if (a.endogenous != b.endogenous) return false;
  if (a.params.size() != b.params.size()) return false;
  if (a.cond_start.size() != b.cond_start.size()) return false;
  if (a.cond_overall.size() != b.cond_overall.size()) return false;
  if (a.add_eff.size() != b.add_eff.size()) return false;
  if (a.del_eff.size() != b.del_eff.size()) return false;
  int n = (int)a.params.size();
  if (n > 8) return false;
  std::vector<int> perm(n);
  for (int i = 0; i < n; ++i) perm[i] = i;
  auto bs = [&](const std::vector<LiftedAtom>& v) {
    std::vector<LiftedAtom> out = v;
    std::sort(out.begin(), out.end());
    return out;
  };
  std::vector<LiftedAtom> b_cs = bs(b.cond_start), b_co = bs(b.cond_overall);
  std::vector<LiftedAtom> b_ae = bs(b.add_eff), b_de = bs(b.del_eff);
  do {
    bool type_ok = true;
    for (int i = 0; i < n; ++i)
      if (a.params[i].type != b.params[perm[i]].type) {
        type_ok = false;
        break;
      }
    if (!type_ok) continue;
    using structdetail::remapped_sorted;
    if (remapped_sorted(a.cond_start, perm) != b_cs) continue;
    if (remapped_sorted(a.cond_overall, perm) != b_co) continue;
    if (remapped_sorted(a.add_eff, perm) != b_ae) continue;
    if (remapped_sorted(a.del_eff, perm) != b_de) continue;
    return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

// Count reference exogenous schemas matched one-to-one by learned ones.
inline int match_exogenous(const ProcessModel& learned,
                           const ProcessModel& reference) {
  std::vector<bool> used(learned.schemas.size(), false);
  int matched = 0;
  for (const ProcessSchema& ref : reference.schemas) {
    if (ref.endogenous) continue;
    for (int i = 0; i < (int)learned.schemas.size(); ++i) {
      if (used[i] || learned.schemas[i].endogenous) continue;
      if (schemas_equivalent(learned.schemas[i], ref)) {
        used[i] = true;
        ++matched;
        break;
      }
    }
  }
  return matched;
}

}  // namespace exo

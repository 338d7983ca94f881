#pragma once

// Causal process schemas and their groundings.
//
// A schema is a lifted process: typed parameters, start/overall conditions,
// add/delete effects, a log strength, and a delay distribution. Endogenous
// schemas additionally carry an option spec (the skill that triggers them) and
// predicate-level ignore effects; exogenous schemas trigger themselves on a
// rising edge of their start conditions.

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "exo/delay.hpp"
#include "exo/symbols.hpp"

namespace exo {

struct Variable {
  std::string name;  // includes the '?', e.g. "?robot"
  TypeId type = -1;
};

// Atom over schema parameters; args index into the parameter list.
struct LiftedAtom {
  PredId pred = -1;
  std::vector<int> args;

  bool operator==(const LiftedAtom& o) const {
    return pred == o.pred && args == o.args;
  }
  bool operator<(const LiftedAtom& o) const {
    if (pred != o.pred) return pred < o.pred;
    return args < o.args;
  }
};

struct OptionSpec {
  std::string skill;       // e.g. "PickJug"
  std::vector<int> args;   // parameter indices, in skill-argument order
};

struct FrameAxiom {
  double log_strength = 1.0;  // W_F
};

struct ProcessSchema {
  std::string name;
  bool endogenous = true;
  std::vector<Variable> params;
  std::vector<LiftedAtom> cond_start;
  std::vector<LiftedAtom> cond_overall;
  std::vector<LiftedAtom> cond_end;  // reserved; never evaluated
  std::vector<LiftedAtom> add_eff;
  std::vector<LiftedAtom> del_eff;
  std::vector<PredId> ignore_effects;  // endogenous only; predicate-level
  double log_strength = 1.0;
  DelayDistribution delay = DelayDistribution::constant(1.0);
  OptionSpec option;  // endogenous only

  bool is_noop() const {
    return endogenous && add_eff.empty() && del_eff.empty() &&
           cond_start.empty();
  }
};

struct ProcessModel {
  std::vector<ProcessSchema> schemas;
  FrameAxiom frame;

  int find_schema(const std::string& name) const {
    for (int i = 0; i < (int)schemas.size(); ++i)
      if (schemas[i].name == name) return i;
    return -1;
  }
};

struct GroundProcess {
  int schema = -1;
  std::vector<ObjectId> binding;  // per schema parameter
  std::vector<AtomId> cond_start;
  std::vector<AtomId> cond_overall;
  std::vector<AtomId> add_eff;
  std::vector<AtomId> del_eff;
  std::string key;  // "Name(obj1, obj2)"; canonical event ordering is by key
};

inline GroundAtom bind_atom(const LiftedAtom& a,
                            const std::vector<ObjectId>& binding) {
  GroundAtom g;
  g.pred = a.pred;
  g.args.reserve(a.args.size());
  for (int idx : a.args) g.args.push_back(binding[idx]);
  return g;
}

inline std::string ground_key(const Symbols& sym, const ProcessSchema& schema,
                              const std::vector<ObjectId>& binding) {
  std::string key = schema.name + "(";
  for (size_t i = 0; i < binding.size(); ++i) {
    if (i) key += ", ";
    key += sym.objects[binding[i]].name;
  }
  key += ")";
  return key;
}

// Predicates that appear in some effect of the model are dynamic; all others
// are static and can be checked once against the initial state.
inline std::vector<bool> dynamic_predicates(const Symbols& sym,
                                            const ProcessModel& model) {
  std::vector<bool> dyn(sym.preds.size(), false);
  for (const ProcessSchema& s : model.schemas) {
    for (const LiftedAtom& a : s.add_eff) dyn[a.pred] = true;
    for (const LiftedAtom& a : s.del_eff) dyn[a.pred] = true;
  }
  return dyn;
}

struct Grounding {
  const ProcessModel* model = nullptr;
  const TaskUniverse* universe = nullptr;
  std::vector<GroundProcess> processes;  // deterministic order
  std::vector<std::vector<int>> by_schema;  // schema -> process indices
};

// Ground every schema over the task objects. Groundings whose static
// condition atoms fail in init are dropped, as are those mentioning atoms
// outside the universe. Dynamic predicates marked from the model's effects,
// plus any predicate in `extra_dynamic` (derived predicates recomputed by the
// simulator change without appearing in effects).
inline Grounding ground_all(const Symbols& sym, const TaskUniverse& universe,
                            const ProcessModel& model,
                            const AbstractState& init,
                            const std::vector<PredId>& extra_dynamic = {}) {
  std::vector<bool> dyn = dynamic_predicates(sym, model);
  for (PredId p : extra_dynamic)
    if (p >= 0 && p < (PredId)dyn.size()) dyn[p] = true;

  std::vector<std::vector<ObjectId>> by_type(sym.types.size());
  for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
    by_type[sym.objects[o].type].push_back(o);

  Grounding g;
  g.model = &model;
  g.universe = &universe;
  g.by_schema.resize(model.schemas.size());

  for (int si = 0; si < (int)model.schemas.size(); ++si) {
    const ProcessSchema& schema = model.schemas[si];
    std::vector<std::vector<ObjectId>> bindings{{}};
    for (const Variable& v : schema.params) {
      std::vector<std::vector<ObjectId>> next;
      for (const auto& b : bindings)
        for (ObjectId o : by_type[v.type]) {
          auto b2 = b;
          b2.push_back(o);
          next.push_back(std::move(b2));
        }
      bindings = std::move(next);
    }
    for (const auto& b : bindings) {
      GroundProcess gp;
      gp.schema = si;
      gp.binding = b;
      bool ok = true;
      auto ground_list = [&](const std::vector<LiftedAtom>& lifted,
                             std::vector<AtomId>& out, bool conditions) {
        for (const LiftedAtom& la : lifted) {
          GroundAtom ga = bind_atom(la, b);
          if (!universe.contains(ga)) {
            ok = false;
            return;
          }
          AtomId id = universe.id_of(ga);
          if (conditions && !dyn[la.pred] && !init.test(id)) {
            ok = false;  // static condition false forever
            return;
          }
          out.push_back(id);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
      };
      ground_list(schema.cond_start, gp.cond_start, true);
      if (ok) ground_list(schema.cond_overall, gp.cond_overall, true);
      if (ok) ground_list(schema.add_eff, gp.add_eff, false);
      if (ok) ground_list(schema.del_eff, gp.del_eff, false);
      if (!ok) continue;
      gp.key = ground_key(sym, schema, b);
      g.by_schema[si].push_back((int)g.processes.size());
      g.processes.push_back(std::move(gp));
    }
  }
  return g;
}

inline bool cond_holds(const std::vector<AtomId>& cond,
                       const AbstractState& s) {
  for (AtomId a : cond)
    if (!s.test(a)) return false;
  return true;
}

}  // namespace exo

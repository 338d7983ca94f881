#pragma once
// Tiny two-item world shared by the learning tests:
//   endo Set(?x):   no conditions, add Prim(x)
//   endo Clear(?x): C = {Prim(x)}, del Prim(x)
//   endo NoOp
// The generator model carries the real exogenous processes; the learner
// always starts from the endogenous part alone.

#include <string>
#include <utility>
#include <vector>

#include "exo/process.hpp"
#include "exo/symbols.hpp"
#include "exo/trajectory.hpp"
#include "exo/world.hpp"

struct Lab {
  exo::Symbols sym;
  exo::TypeId item = -1;
  exo::PredId Prim = -1, Aux = -1, Stat = -1, Junk = -1;
  exo::TaskUniverse uni;
  exo::ProcessModel truth;
  exo::ProcessModel given;
  exo::Grounding g_truth;
  exo::World world;
  exo::AbstractState init;

  explicit Lab(
      exo::DelayDistribution truth_set = exo::DelayDistribution::constant(2.0),
      exo::DelayDistribution given_set = exo::DelayDistribution::constant(2.0),
      std::vector<std::string> skill_ignores = {}) {
    item = sym.add_type("item");
    sym.add_object("a", item);
    sym.add_object("b", item);
    Prim = sym.add_pred({"Prim", {item}, ""});
    Aux = sym.add_pred({"Aux", {item}, ""});
    Stat = sym.add_pred({"Stat", {item}, ""});
    Junk = sym.add_pred({"Junk", {item}, ""});

    auto endo_part = [&](exo::DelayDistribution set_delay,
                         const std::vector<std::string>& ignores) {
      exo::ProcessModel m;
      exo::ProcessSchema set;
      set.name = "Set";
      set.params = {{"?x", item}};
      set.add_eff = {{Prim, {0}}};
      set.delay = set_delay;
      set.option = {"Set", {0}};
      exo::ProcessSchema clear;
      clear.name = "Clear";
      clear.params = {{"?x", item}};
      clear.cond_start = {{Prim, {0}}};
      clear.del_eff = {{Prim, {0}}};
      clear.delay = exo::DelayDistribution::constant(2.0);
      clear.option = {"Clear", {0}};
      for (const std::string& p : ignores) {
        set.ignore_effects.push_back(sym.pred_id(p));
        clear.ignore_effects.push_back(sym.pred_id(p));
      }
      exo::ProcessSchema noop;
      noop.name = "NoOp";
      noop.delay = exo::DelayDistribution::constant(1.0);
      noop.option = {"NoOp", {}};
      noop.ignore_effects.push_back(Junk);  // never absorbs residue
      m.schemas = {set, clear, noop};
      return m;
    };
    truth = endo_part(truth_set, {});
    given = endo_part(given_set, skill_ignores);
  }

  void add_exo(const std::string& name, std::vector<exo::PredId> cond,
               std::vector<exo::PredId> add, std::vector<exo::PredId> del,
               exo::DelayDistribution delay, double W = 2.0) {
    exo::ProcessSchema s;
    s.name = name;
    s.endogenous = false;
    s.params = {{"?x", item}};
    for (exo::PredId p : cond) s.cond_start.push_back({p, {0}});
    s.cond_overall = s.cond_start;
    for (exo::PredId p : add) s.add_eff.push_back({p, {0}});
    for (exo::PredId p : del) s.del_eff.push_back({p, {0}});
    s.delay = delay;
    s.log_strength = W;
    truth.schemas.push_back(s);
  }

  void finish(std::vector<std::pair<exo::PredId, std::string>> init_atoms) {
    uni = exo::atom_universe(sym, {Prim, Aux, Stat, Junk});
    init = exo::AbstractState(uni.size());
    for (auto& [p, o] : init_atoms)
      init.set(uni.id_of({p, {sym.object_id(o)}}));
    g_truth = exo::ground_all(sym, uni, truth, init);
    world = {&sym, &uni, &g_truth, nullptr, 100};
  }

  exo::StepCommand cmd(const std::string& skill, const std::string& obj) const {
    return exo::StepCommand::make(skill, {sym.object_id(obj)});
  }
  exo::StepCommand noop() const { return exo::StepCommand::make("NoOp", {}); }

  exo::Trajectory run(uint64_t seed, const std::vector<exo::StepCommand>& script,
                      int wait_k = 25) {
    exo::RandomSource rng(seed);
    exo::WorldState ws = exo::world_init(world, init, rng);
    exo::Trajectory tr;
    tr.env = "lab";
    tr.seed = seed;
    for (const exo::StepCommand& c : script)
      exo::record_step(world, ws, c, rng, tr, exo::StepMode::kSample, wait_k);
    return tr;
  }

  exo::ProcessSchema exo_schema(std::vector<exo::PredId> cond,
                                std::vector<exo::PredId> add,
                                std::vector<exo::PredId> del) const {
    exo::ProcessSchema s;
    s.name = "ref";
    s.endogenous = false;
    s.params = {{"?x", item}};
    for (exo::PredId p : cond) s.cond_start.push_back({p, {0}});
    s.cond_overall = s.cond_start;
    for (exo::PredId p : add) s.add_eff.push_back({p, {0}});
    for (exo::PredId p : del) s.del_eff.push_back({p, {0}});
    return s;
  }
};

inline std::vector<const exo::ProcessSchema*> learned_exo(
    const exo::ProcessModel& m) {
  std::vector<const exo::ProcessSchema*> out;
  for (const exo::ProcessSchema& s : m.schemas)
    if (!s.endogenous) out.push_back(&s);
  return out;
}

#include <string>
#include <vector>

#include "doctest.h"
#include "exo/planner.hpp"
#include "oracles.hpp"

using namespace exo;

namespace {

// Propositional worlds: every predicate is 0-ary, so atoms == predicates.
struct PropWorld {
  Symbols sym;
  TaskUniverse universe;
  ProcessModel model;
  Grounding grounding;
  DerivedRuleSet rules;
  World world;
  AbstractState init;

  std::vector<PredId> preds;

  explicit PropWorld(int n_atoms) {
    for (int i = 0; i < n_atoms; ++i)
      preds.push_back(sym.add_pred({"A" + std::to_string(i), {}, ""}));
  }

  void add_endo(const std::string& name, std::vector<int> c,
                std::vector<int> add, std::vector<int> del = {},
                std::vector<int> overall = {}, double delay = 1.0) {
    ProcessSchema s;
    s.name = name;
    s.endogenous = true;
    for (int i : c) s.cond_start.push_back({preds[i], {}});
    for (int i : overall) s.cond_overall.push_back({preds[i], {}});
    for (int i : add) s.add_eff.push_back({preds[i], {}});
    for (int i : del) s.del_eff.push_back({preds[i], {}});
    s.delay = DelayDistribution::constant(delay);
    s.option = {name, {}};
    model.schemas.push_back(s);
  }
  void add_exo(const std::string& name, std::vector<int> c,
               std::vector<int> add, std::vector<int> del = {},
               std::vector<int> overall = {}, double delay = 1.0) {
    ProcessSchema s;
    s.name = name;
    s.endogenous = false;
    for (int i : c) s.cond_start.push_back({preds[i], {}});
    for (int i : overall) s.cond_overall.push_back({preds[i], {}});
    for (int i : add) s.add_eff.push_back({preds[i], {}});
    for (int i : del) s.del_eff.push_back({preds[i], {}});
    s.delay = DelayDistribution::constant(delay);
    model.schemas.push_back(s);
  }
  void add_noop() {
    ProcessSchema s;
    s.name = "NoOp";
    s.delay = DelayDistribution::constant(1.0);
    s.option = {"NoOp", {}};
    model.schemas.push_back(s);
  }

  void finish(std::vector<int> init_atoms) {
    universe = atom_universe(sym, preds);
    init = AbstractState(universe.size());
    for (int i : init_atoms) init.set(universe.id_of({preds[i], {}}));
    grounding = ground_all(sym, universe, model, init);
    world = {&sym, &universe, &grounding, rules.empty() ? nullptr : &rules,
             100};
  }

  AtomId atom(int i) const { return universe.id_of({preds[i], {}}); }
  std::vector<AtomId> goal(std::vector<int> is) const {
    std::vector<AtomId> g;
    for (int i : is) g.push_back(atom(i));
    return g;
  }
};

}  // namespace

TEST_CASE("ff counts the chain length") {
  PropWorld p(4);
  p.add_endo("P0", {0}, {1});
  p.add_endo("P1", {1}, {2});
  p.add_endo("P2", {2}, {3});
  p.add_noop();
  p.finish({0});
  CHECK(ff_heuristic(p.world, p.init, p.goal({3})) == 3);
  CHECK(ff_heuristic(p.world, p.init, p.goal({1})) == 1);
  CHECK(ff_heuristic(p.world, p.init, p.goal({0})) == 0);
}

TEST_CASE("ff gives exogenous processes for free") {
  PropWorld p(4);
  p.add_endo("P0", {0}, {1});
  p.add_exo("X", {1}, {2}, {}, {}, 2.0);
  p.add_endo("P2", {2}, {3});
  p.add_noop();
  p.finish({0});
  CHECK(ff_heuristic(p.world, p.init, p.goal({3})) == 2);
  CHECK(ff_heuristic(p.world, p.init, p.goal({2})) == 1);  // P0 then free X
}

TEST_CASE("ff is infinite exactly when the goal is relaxed-unreachable") {
  PropWorld p(3);
  p.add_endo("P0", {0}, {1});
  p.add_noop();
  p.finish({0});
  CHECK(ff_heuristic(p.world, p.init, p.goal({2})) == kCostInf);
  CHECK(ff_heuristic(p.world, p.init, p.goal({1})) == 1);
}

TEST_CASE("a* plans through an exogenous wait") {
  PropWorld p(4);
  p.add_endo("P0", {0}, {1});
  p.add_exo("X", {1}, {2}, {}, {}, 2.0);
  p.add_endo("P2", {2}, {3});
  p.add_noop();
  p.finish({0});
  RandomSource rng(0);
  WorldState start = world_init(p.world, p.init, rng, StepMode::kExpected);
  PlanResult r = astar_plan(p.world, start, p.goal({3}));
  REQUIRE(r.status == PlanStatus::kFound);
  REQUIRE(r.commands.size() == 3);
  CHECK(r.commands[0].skill == "P0");
  CHECK(r.commands[1].skill == "NoOp");
  CHECK(r.commands[2].skill == "P2");

  // executing the plan in expected mode reaches the goal
  WorldState ws = world_init(p.world, p.init, rng, StepMode::kExpected);
  for (const StepCommand& c : r.commands) {
    BigStepResult br = big_step(p.world, ws, c, rng, StepMode::kExpected);
    CHECK(br.completed);
  }
  CHECK(ws.atoms.test(p.atom(3)));
}

TEST_CASE("a* reports unreachable when the heuristic is infinite") {
  PropWorld p(3);
  p.add_endo("P0", {0}, {1});
  p.add_noop();
  p.finish({0});
  RandomSource rng(0);
  WorldState start = world_init(p.world, p.init, rng, StepMode::kExpected);
  PlanResult r = astar_plan(p.world, start, p.goal({2}));
  CHECK(r.status == PlanStatus::kUnreachable);
  CHECK(r.h0 == kCostInf);
}

TEST_CASE("a* does not idle when nothing can ever land") {
  // P0 requires atom 1 which nothing provides; NoOp successors are gated on
  // pending or triggerable events, so the frontier must simply drain.
  PropWorld p(3);
  p.add_endo("P0", {1}, {2});
  p.add_noop();
  p.finish({0});
  RandomSource rng(0);
  WorldState start = world_init(p.world, p.init, rng, StepMode::kExpected);
  PlanResult r = astar_plan(p.world, start, p.goal({2}));
  CHECK(r.status == PlanStatus::kUnreachable);
  CHECK(r.h0 == kCostInf);  // relaxed graph cannot reach it either
  CHECK(r.expansions <= 2);
}

TEST_CASE("derived predicates expand into their rule bodies") {
  // D <= A1 and A2 (rpg rule); P needs D, achievers of A1 and A2 both count
  Symbols sym;
  TypeId obj = sym.add_type("obj");
  sym.add_object("o", obj);
  PredId A0 = sym.add_pred({"A0", {obj}, ""});
  PredId A1 = sym.add_pred({"A1", {obj}, ""});
  PredId A2 = sym.add_pred({"A2", {obj}, ""});
  PredId D = sym.add_pred({"D", {obj}, ""});
  PredId G = sym.add_pred({"G", {obj}, ""});

  ProcessModel model;
  auto endo = [&](const std::string& name, PredId c, PredId add) {
    ProcessSchema s;
    s.name = name;
    s.params = {{"?x", obj}};
    s.cond_start = {{c, {0}}};
    s.add_eff = {{add, {0}}};
    s.delay = DelayDistribution::constant(1.0);
    s.option = {name, {0}};
    return s;
  };
  model.schemas.push_back(endo("MakeA1", A0, A1));
  model.schemas.push_back(endo("MakeA2", A0, A2));
  ProcessSchema use;
  use.name = "UseD";
  use.params = {{"?x", obj}};
  use.cond_start = {{D, {0}}};
  use.add_eff = {{G, {0}}};
  use.delay = DelayDistribution::constant(1.0);
  use.option = {"UseD", {0}};
  model.schemas.push_back(use);

  DerivedRuleSet rules;
  DerivedPredicateRule r;
  r.name = "D-from-A1-A2";
  r.vars = {{"?x", obj}};
  r.head = D;
  r.head_args = {0};
  r.body = {{A1, {0}, true}, {A2, {0}, true}};
  r.use_in_sim = true;
  r.use_in_rpg = true;
  rules.rules.push_back(r);
  rules.derived_preds = {D};

  TaskUniverse u = atom_universe(sym, {A0, A1, A2, D, G});
  AbstractState init(u.size());
  init.set(u.id_of({A0, {0}}));
  Grounding g = ground_all(sym, u, model, init, {D});
  World w{&sym, &u, &g, &rules, 100};

  CHECK(ff_heuristic(w, init, {u.id_of({G, {0}})}) == 3);

  AbstractState both = init;
  both.set(u.id_of({A1, {0}}));
  both.set(u.id_of({A2, {0}}));
  refresh_derived(sym, u, rules, both);
  CHECK(both.test(u.id_of({D, {0}})));
  CHECK(ff_heuristic(w, both, {u.id_of({D, {0}})}) == 0);
  CHECK(ff_heuristic(w, both, {u.id_of({G, {0}})}) == 1);

  // the plan threads through the derived condition
  RandomSource rng(0);
  WorldState start = world_init(w, init, rng, StepMode::kExpected);
  PlanResult pr = astar_plan(w, start, {u.id_of({G, {0}})});
  REQUIRE(pr.status == PlanStatus::kFound);
  CHECK(pr.commands.size() == 3);
  CHECK(pr.commands[2].skill == "UseD");
}

TEST_CASE("ff infinity matches naive relaxed saturation on random worlds") {
  int checked = 0, unreachable = 0;
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource rng(seed * 77 + 5);
    int n = 4 + (int)rng.uniform_int(9);  // 4..12 atoms
    PropWorld p(n);
    int n_procs = 2 + (int)rng.uniform_int(6);
    for (int i = 0; i < n_procs; ++i) {
      auto pick = [&](int k) {
        std::vector<int> out;
        for (int j = 0; j < k; ++j) out.push_back((int)rng.uniform_int(n));
        return out;
      };
      std::vector<int> c = pick((int)rng.uniform_int(3));
      std::vector<int> ov = pick((int)rng.uniform_int(2));
      std::vector<int> add = pick(1 + (int)rng.uniform_int(2));
      std::vector<int> del = pick((int)rng.uniform_int(2));
      if (rng.uniform() < 0.5)
        p.add_endo("P" + std::to_string(i), c, add, del, ov);
      else
        p.add_exo("X" + std::to_string(i), c, add, del, ov);
    }
    p.add_noop();
    std::vector<int> init_atoms;
    for (int a = 0; a < n; ++a)
      if (rng.uniform() < 0.4) init_atoms.push_back(a);
    p.finish(init_atoms);
    std::vector<int> goal_atoms;
    for (int k = 0; k < 1 + (int)rng.uniform_int(2); ++k)
      goal_atoms.push_back((int)rng.uniform_int(n));
    std::vector<AtomId> goal = p.goal(goal_atoms);

    int h = ff_heuristic(p.world, p.init, goal);
    bool reach = oracle::relaxed_reachable(p.grounding.processes, p.init, goal,
                                           p.universe.size());
    CHECK((h == kCostInf) == !reach);
    ++checked;
    if (!reach) ++unreachable;
  }
  CHECK(checked == 50);
  CHECK(unreachable > 0);  // the sample exercises both outcomes
}

TEST_CASE("planning twice gives the same command sequence") {
  PropWorld p(6);
  p.add_endo("P0", {0}, {1});
  p.add_endo("P1", {0}, {2});
  p.add_endo("P2", {1, 2}, {3}, {0});
  p.add_exo("X", {3}, {4});
  p.add_endo("P4", {4}, {5});
  p.add_noop();
  p.finish({0});
  RandomSource rng(0);
  WorldState start = world_init(p.world, p.init, rng, StepMode::kExpected);
  PlanResult a = astar_plan(p.world, start, p.goal({5}));
  PlanResult b = astar_plan(p.world, start, p.goal({5}));
  REQUIRE(a.status == PlanStatus::kFound);
  REQUIRE(b.status == PlanStatus::kFound);
  REQUIRE(a.commands.size() == b.commands.size());
  for (size_t i = 0; i < a.commands.size(); ++i) {
    CHECK(a.commands[i].skill == b.commands[i].skill);
    CHECK(a.commands[i].args == b.commands[i].args);
  }
  // and the plan actually works
  WorldState ws = world_init(p.world, p.init, rng, StepMode::kExpected);
  for (const StepCommand& c : a.commands)
    big_step(p.world, ws, c, rng, StepMode::kExpected);
  CHECK(ws.atoms.test(p.atom(5)));
}

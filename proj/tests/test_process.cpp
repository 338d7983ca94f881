#include <doctest.h>

#include "exo/process.hpp"

using namespace exo;

// small two-jug world with one dynamic and one static predicate
namespace {
struct Fixture {
  Symbols sym;
  ProcessModel model;
  TaskUniverse universe;
  AbstractState init;

  Fixture() {
    TypeId jug = sym.add_type("jug");
    TypeId faucet = sym.add_type("faucet");
    sym.add_object("j1", jug);
    sym.add_object("j2", jug);
    sym.add_object("f1", faucet);
    PredId at = sym.add_pred({"At", {jug, faucet}, ""});
    PredId full = sym.add_pred({"Full", {jug}, ""});
    PredId metal = sym.add_pred({"Metal", {jug}, ""});

    ProcessSchema fill;
    fill.name = "Fill";
    fill.endogenous = false;
    fill.params = {{"?j", jug}, {"?f", faucet}};
    fill.cond_start = {{at, {0, 1}}, {metal, {0}}};
    fill.cond_overall = fill.cond_start;
    fill.add_eff = {{full, {0}}};
    model.schemas.push_back(fill);

    universe = atom_universe(sym, {at, full, metal});
    init = AbstractState(universe.size());
    init.set(universe.id_of({at, {sym.object_id("j1"), sym.object_id("f1")}}));
    init.set(universe.id_of({metal, {sym.object_id("j1")}}));
  }
};
}  // namespace

TEST_CASE("grounding enumerates typed bindings and prunes static falsehoods") {
  Fixture fx;
  Grounding g = ground_all(fx.sym, fx.universe, fx.model, fx.init);
  // j2 is not metal and Metal is static (appears in no effect), so only the
  // j1 grounding survives
  REQUIRE(g.processes.size() == 1);
  CHECK(g.processes[0].key == "Fill(j1, f1)");
  CHECK(g.processes[0].cond_start.size() == 2);
  CHECK(g.processes[0].add_eff.size() == 1);
  CHECK(cond_holds(g.processes[0].cond_start, fx.init));
}

TEST_CASE("dynamic predicates are not pruned at grounding") {
  Fixture fx;
  // put j2 at the faucet too, and make Metal dynamic via a deleting process
  fx.init.set(fx.universe.id_of({fx.sym.pred_id("At"),
                                 {fx.sym.object_id("j2"), fx.sym.object_id("f1")}}));
  ProcessSchema rust;
  rust.name = "Rust";
  rust.endogenous = false;
  rust.params = {{"?j", fx.sym.type_id("jug")}};
  rust.del_eff = {{fx.sym.pred_id("Metal"), {0}}};
  rust.cond_start = {{fx.sym.pred_id("Metal"), {0}}};
  rust.cond_overall = rust.cond_start;
  fx.model.schemas.push_back(rust);
  Grounding g = ground_all(fx.sym, fx.universe, fx.model, fx.init);
  // Fill grounds for both jugs now: Metal is dynamic, so Metal(j2) being
  // false at init no longer prunes, it just fails cond_holds
  REQUIRE(g.by_schema[0].size() == 2);
  REQUIRE(g.by_schema[1].size() == 2);
  const GroundProcess& j2fill = g.processes[g.by_schema[0][1]];
  CHECK_FALSE(cond_holds(j2fill.cond_start, fx.init));
}

TEST_CASE("ground keys are canonical and deterministic") {
  Fixture fx;
  Grounding a = ground_all(fx.sym, fx.universe, fx.model, fx.init);
  Grounding b = ground_all(fx.sym, fx.universe, fx.model, fx.init);
  REQUIRE(a.processes.size() == b.processes.size());
  for (size_t i = 0; i < a.processes.size(); ++i)
    CHECK(a.processes[i].key == b.processes[i].key);
}

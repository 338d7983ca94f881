#include <doctest.h>

#include "exo/symbols.hpp"

using namespace exo;

static Symbols two_type_world() {
  Symbols sym;
  TypeId jug = sym.add_type("jug");
  TypeId cup = sym.add_type("cup");
  sym.add_object("j1", jug);
  sym.add_object("j2", jug);
  sym.add_object("c1", cup);
  sym.add_pred({"Full", {jug}, ""});
  sym.add_pred({"Above", {jug, cup}, ""});
  return sym;
}

TEST_CASE("atom universe is canonically ordered and dense") {
  Symbols sym = two_type_world();
  TaskUniverse u = atom_universe(sym, {sym.pred_id("Full"), sym.pred_id("Above")});
  // Above(j1,c1), Above(j2,c1), Full(j1), Full(j2): lexicographic by
  // (predicate name, argument names)
  REQUIRE(u.size() == 4);
  CHECK(atom_str(sym, u.atoms[0]) == "Above(j1, c1)");
  CHECK(atom_str(sym, u.atoms[1]) == "Above(j2, c1)");
  CHECK(atom_str(sym, u.atoms[2]) == "Full(j1)");
  CHECK(atom_str(sym, u.atoms[3]) == "Full(j2)");
  for (AtomId i = 0; i < u.size(); ++i) CHECK(u.id_of(u.atoms[i]) == i);
}

TEST_CASE("bitset state ops") {
  AbstractState s(130);
  s.set(0);
  s.set(64);
  s.set(129);
  CHECK(s.count() == 3);
  CHECK(s.test(64));
  CHECK_FALSE(s.test(63));
  AbstractState t = s;
  CHECK(t == s);
  CHECK(s.subset_of(t));
  t.set(5);
  CHECK(s.subset_of(t));
  CHECK_FALSE(t.subset_of(s));
  t.reset(5);
  CHECK(t == s);
  CHECK(s.to_ids() == std::vector<AtomId>({0, 64, 129}));
  CHECK(s.hash() == t.hash());
}

TEST_CASE("duplicate interning is idempotent, conflicting types rejected") {
  Symbols sym = two_type_world();
  CHECK(sym.add_type("jug") == sym.type_id("jug"));
  CHECK(sym.add_object("j1", sym.type_id("jug")) == sym.object_id("j1"));
  CHECK_THROWS(sym.add_object("j1", sym.type_id("cup")));
  CHECK(sym.objects.size() == 3);
}

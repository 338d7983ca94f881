#pragma once

// Domino: topple target dominoes by filling the gap in a chain with a
// movable block and pushing the starter. Tilting spreads to whatever stands
// directly in front of a tilting domino, unless that domino is too heavy,
// which is the latent concept (NOT-IsImmovable). The training scene ends its
// chain with a heavy block so demonstrations show tilt stopping there; a
// fraction of test tasks make the final target heavy, which leaves the goal
// provably unreachable under the true model.

#include "exo/env.hpp"
#include "exo/envs/given_listings.hpp"

namespace exo {

namespace domino_detail {

inline long fget(const FeatureState& fs, ObjectId o, const char* k) {
  return std::lround(fs.features[o].at(k));
}

struct DirDef {
  const char* name;
  int dx, dy, deg;  // deg is the rotation that faces this direction
};

inline const DirDef kDirs[4] = {{"east", 1, 0, 90},
                                {"north", 0, 1, 0},
                                {"south", 0, -1, 180},
                                {"west", -1, 0, 270}};

inline void populate(const EnvironmentDef& env, Task& t, RandomSource& rng) {
  Symbols& sym = t.sym;
  bool train = t.split == Split::kTrain;
  int cols = 4;
  int rows = train ? 2 : 3;
  int n_movable = train ? 1 : 2;
  int n_targets = train ? 1 : 1 + (int)rng.uniform_int(2);
  bool impossible = !train && rng.uniform() < env.impossible_fraction;

  ObjectId robot = sym.add_object("robot0", sym.type_id("robot"));
  std::vector<std::vector<ObjectId>> cell(cols, std::vector<ObjectId>(rows));
  for (int c = 0; c < cols; ++c)
    for (int w = 0; w < rows; ++w)
      cell[c][w] =
          sym.add_object("pos_" + std::to_string(c) + "_" + std::to_string(w),
                         sym.type_id("loc"));
  std::map<int, ObjectId> angle;
  for (int deg : {0, 90, 180, 270})
    angle[deg] =
        sym.add_object("angle" + std::to_string(deg), sym.type_id("angle"));
  for (const DirDef& d : kDirs) sym.add_object(d.name, sym.type_id("direction"));

  ObjectId green = sym.add_object("green0", sym.type_id("domino"));
  std::vector<ObjectId> movables, targets;
  for (int i = 0; i < n_movable; ++i)
    movables.push_back(
        sym.add_object("m" + std::to_string(i), sym.type_id("domino")));
  for (int i = 0; i < n_targets; ++i)
    targets.push_back(
        sym.add_object("t" + std::to_string(i), sym.type_id("domino")));
  ObjectId blocker = -1;
  if (train) blocker = sym.add_object("h0", sym.type_id("domino"));

  t.feats.features.resize(sym.objects.size());
  t.feats.features[robot]["holding"] = -1;
  for (int c = 0; c < cols; ++c)
    for (int w = 0; w < rows; ++w) {
      t.feats.features[cell[c][w]]["col"] = c;
      t.feats.features[cell[c][w]]["row"] = w;
    }
  for (auto& [deg, a] : angle) t.feats.features[a]["deg"] = deg;
  for (const DirDef& d : kDirs) {
    ObjectId o = sym.object_id(d.name);
    t.feats.features[o]["dx"] = d.dx;
    t.feats.features[o]["dy"] = d.dy;
  }

  auto put_domino = [&](ObjectId d, int c, int w, int deg, bool movable,
                        bool initial, bool heavy) {
    auto& f = t.feats.features[d];
    f["col"] = c;
    f["row"] = w;
    f["rot"] = deg;
    f["upright"] = 1;
    f["tilting"] = 0;
    f["toppled"] = 0;
    f["movable"] = movable ? 1 : 0;
    f["initial"] = initial ? 1 : 0;
    f["heavy"] = heavy ? 1 : 0;
  };

  std::set<std::pair<int, int>> used;
  if (train) {
    // fixed chain: starter, gap, target, heavy blocker across one row
    int cr = (int)rng.uniform_int(rows);
    put_domino(green, 0, cr, 90, false, true, false);
    put_domino(targets[0], 2, cr, 90, false, false, false);
    put_domino(blocker, 3, cr, 90, false, false, true);
    for (int c = 0; c < cols; ++c) used.insert({c, cr});
  } else {
    // chain: starter, gap, then the targets, in a random feasible direction
    int len = 2 + n_targets;
    std::vector<const DirDef*> feas;
    for (const DirDef& d : kDirs)
      if (std::abs(d.dx) * (len - 1) < cols &&
          std::abs(d.dy) * (len - 1) < rows)
        feas.push_back(&d);
    const DirDef& dir = *feas[rng.uniform_int(feas.size())];
    std::vector<std::pair<int, int>> starts;
    for (int c = 0; c < cols; ++c)
      for (int w = 0; w < rows; ++w) {
        int ec = c + dir.dx * (len - 1), er = w + dir.dy * (len - 1);
        if (ec >= 0 && ec < cols && er >= 0 && er < rows)
          starts.emplace_back(c, w);
      }
    auto [c0, r0] = starts[rng.uniform_int(starts.size())];
    put_domino(green, c0, r0, dir.deg, false, true, false);
    used.insert({c0, r0});
    used.insert({c0 + dir.dx, r0 + dir.dy});  // the gap
    for (int i = 0; i < n_targets; ++i) {
      int c = c0 + dir.dx * (2 + i), w = r0 + dir.dy * (2 + i);
      bool heavy = impossible && i == n_targets - 1;
      put_domino(targets[i], c, w, dir.deg, false, false, heavy);
      used.insert({c, w});
    }
  }
  std::vector<std::pair<int, int>> free_cells;
  for (int c = 0; c < cols; ++c)
    for (int w = 0; w < rows; ++w)
      if (!used.count({c, w})) free_cells.emplace_back(c, w);
  for (ObjectId m : movables) {
    size_t pick = rng.uniform_int(free_cells.size());
    auto [mc, mr] = free_cells[pick];
    free_cells.erase(free_cells.begin() + pick);
    put_domino(m, mc, mr, 90 * (int)rng.uniform_int(4), true, false, false);
  }

  t.impossible = impossible;
  for (ObjectId tg : targets)
    t.goal_atoms.push_back({sym.pred_id("Toppled"), {tg}});
}

}  // namespace domino_detail

inline EnvironmentDef make_domino_env() {
  using domino_detail::fget;
  EnvironmentDef env;
  env.name = "domino";
  env.given_listing = given::domino_listing;
  env.start_preds = {"AdjacentTo",       "DominoAtPos", "DominoAtRot",
                     "HandEmpty",        "Holding",     "InFrontDirection",
                     "InitialBlock",     "MovableBlock", "PosClear",
                     "Tilting",          "Toppled",      "Upright"};
  env.hidden_preds = {"NOT-IsImmovable"};
  env.internal_preds = {"NextInDir", "RotFaces"};
  env.catalog = {{"NOT-IsImmovable",
                  {"domino"},
                  "the domino is light enough to be knocked over",
                  "not_immovable"}};
  env.train_task_count = 1;
  env.impossible_fraction = 0.25;

  env.declare = [](Symbols& sym) {
    TypeId angle = sym.add_type("angle");
    TypeId direction = sym.add_type("direction");
    TypeId domino = sym.add_type("domino");
    TypeId loc = sym.add_type("loc");
    TypeId robot = sym.add_type("robot");
    sym.add_pred({"AdjacentTo", {loc, domino}, ""});  // derived
    sym.add_pred({"DominoAtPos", {domino, loc}, "domino_at_pos"});
    sym.add_pred({"DominoAtRot", {domino, angle}, "domino_at_rot"});
    sym.add_pred({"HandEmpty", {robot}, "hand_empty"});
    sym.add_pred({"Holding", {robot, domino}, "holding"});
    sym.add_pred(
        {"InFrontDirection", {domino, domino, direction}, ""});  // derived
    sym.add_pred({"InitialBlock", {domino}, "initial_block"});
    sym.add_pred({"MovableBlock", {domino}, "movable_block"});
    sym.add_pred({"NOT-IsImmovable", {domino}, "not_immovable"});
    sym.add_pred({"NextInDir", {loc, loc, direction}, "next_in_dir"});
    sym.add_pred({"PosClear", {loc}, "pos_clear"});
    sym.add_pred({"RotFaces", {angle, direction}, "rot_faces"});
    sym.add_pred({"Tilting", {domino}, "tilting"});
    sym.add_pred({"Toppled", {domino}, "toppled"});
    sym.add_pred({"Upright", {domino}, "upright"});
  };

  env.classifiers["domino_at_pos"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "col") == fget(fs, a[1], "col") &&
           fget(fs, a[0], "row") == fget(fs, a[1], "row") &&
           fget(fs, a[0], "col") >= 0;
  };
  env.classifiers["domino_at_rot"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "rot") == fget(fs, a[1], "deg");
  };
  env.classifiers["hand_empty"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "holding") < 0;
  };
  env.classifiers["holding"] = [](const Symbols&, const FeatureState& fs,
                                  const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "holding") == a[1];
  };
  env.classifiers["initial_block"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("initial") > 0.5;
  };
  env.classifiers["movable_block"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("movable") > 0.5;
  };
  env.classifiers["not_immovable"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("heavy") < 0.5;
  };
  env.classifiers["next_in_dir"] = [](const Symbols&, const FeatureState& fs,
                                      const std::vector<ObjectId>& a) {
    return fget(fs, a[1], "col") ==
               fget(fs, a[0], "col") + fget(fs, a[2], "dx") &&
           fget(fs, a[1], "row") == fget(fs, a[0], "row") + fget(fs, a[2], "dy");
  };
  env.classifiers["pos_clear"] = [](const Symbols& sym, const FeatureState& fs,
                                    const std::vector<ObjectId>& a) {
    TypeId domino = sym.type_id("domino");
    for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
      if (sym.objects[o].type == domino &&
          fget(fs, o, "col") == fget(fs, a[0], "col") &&
          fget(fs, o, "row") == fget(fs, a[0], "row"))
        return false;
    return true;
  };
  env.classifiers["rot_faces"] = [](const Symbols&, const FeatureState& fs,
                                    const std::vector<ObjectId>& a) {
    long deg = fget(fs, a[0], "deg");
    int dx = deg == 90 ? 1 : deg == 270 ? -1 : 0;
    int dy = deg == 0 ? 1 : deg == 180 ? -1 : 0;
    return fget(fs, a[1], "dx") == dx && fget(fs, a[1], "dy") == dy;
  };
  env.classifiers["tilting"] = [](const Symbols&, const FeatureState& fs,
                                  const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("tilting") > 0.5;
  };
  env.classifiers["toppled"] = [](const Symbols&, const FeatureState& fs,
                                  const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("toppled") > 0.5;
  };
  env.classifiers["upright"] = [](const Symbols&, const FeatureState& fs,
                                  const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("upright") > 0.5;
  };

  env.derived = [](const Symbols& sym) {
    DerivedRuleSet rs;
    {
      DerivedPredicateRule r;
      r.name = "AdjacentTo";
      r.vars = {{"?loc", sym.type_id("loc")},
                {"?domino", sym.type_id("domino")},
                {"?loc2", sym.type_id("loc")},
                {"?dir", sym.type_id("direction")}};
      r.head = sym.pred_id("AdjacentTo");
      r.head_args = {0, 1};
      r.body = {{sym.pred_id("DominoAtPos"), {1, 2}, true},
                {sym.pred_id("NextInDir"), {2, 0, 3}, true}};
      r.use_in_sim = true;
      r.use_in_rpg = true;
      rs.rules.push_back(std::move(r));
    }
    {
      DerivedPredicateRule r;
      r.name = "InFrontDirection";
      r.vars = {{"?domino1", sym.type_id("domino")},
                {"?domino2", sym.type_id("domino")},
                {"?dir", sym.type_id("direction")},
                {"?loc1", sym.type_id("loc")},
                {"?loc2", sym.type_id("loc")},
                {"?angle", sym.type_id("angle")}};
      r.head = sym.pred_id("InFrontDirection");
      r.head_args = {0, 1, 2};
      r.body = {{sym.pred_id("DominoAtPos"), {0, 3}, true},
                {sym.pred_id("DominoAtRot"), {0, 5}, true},
                {sym.pred_id("RotFaces"), {5, 2}, true},
                {sym.pred_id("NextInDir"), {3, 4, 2}, true},
                {sym.pred_id("DominoAtPos"), {1, 4}, true}};
      r.use_in_sim = true;
      r.use_in_rpg = true;
      rs.rules.push_back(std::move(r));
    }
    rs.derived_preds = {sym.pred_id("AdjacentTo"),
                        sym.pred_id("InFrontDirection")};
    return rs;
  };

  env.exogenous = [](const Symbols& sym) {
    std::vector<ProcessSchema> out;
    auto spread_conds = [&sym]() {
      return std::vector<LiftedAtom>{{sym.pred_id("InFrontDirection"), {0, 1, 2}},
                                     {sym.pred_id("NOT-IsImmovable"), {1}},
                                     {sym.pred_id("Tilting"), {0}},
                                     {sym.pred_id("Upright"), {1}}};
    };
    {
      ProcessSchema s;
      s.name = "SpreadTilt";
      s.endogenous = false;
      s.params = {{"?domino1", sym.type_id("domino")},
                  {"?domino2", sym.type_id("domino")},
                  {"?dir", sym.type_id("direction")}};
      s.cond_start = spread_conds();
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("Tilting"), {1}}};
      s.log_strength = 1.0;
      s.delay = DelayDistribution::gaussian(2.0, 0.1);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "SpreadUnbalance";
      s.endogenous = false;
      s.params = {{"?domino1", sym.type_id("domino")},
                  {"?domino2", sym.type_id("domino")},
                  {"?dir", sym.type_id("direction")}};
      s.cond_start = spread_conds();
      s.cond_overall = s.cond_start;
      s.del_eff = {{sym.pred_id("Upright"), {1}}};
      s.log_strength = 1.0;
      s.delay = DelayDistribution::gaussian(2.0, 0.1);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "FallEnd";
      s.endogenous = false;
      s.params = {{"?domino", sym.type_id("domino")}};
      s.cond_start = {{sym.pred_id("Tilting"), {0}}};
      s.cond_overall = s.cond_start;
      s.del_eff = {{sym.pred_id("Tilting"), {0}}};
      s.log_strength = 1.0;
      s.delay = DelayDistribution::gaussian(5.0, 0.1);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "FallTopple";
      s.endogenous = false;
      s.params = {{"?domino", sym.type_id("domino")}};
      s.cond_start = {{sym.pred_id("Tilting"), {0}}};
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("Toppled"), {0}}};
      s.log_strength = 1.0;
      s.delay = DelayDistribution::gaussian(5.0, 0.1);
      out.push_back(std::move(s));
    }
    return out;
  };

  env.populate = domino_detail::populate;
  return env;
}

}  // namespace exo

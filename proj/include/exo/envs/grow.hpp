#pragma once

// Grow: water every pot with a jug of matching color. Holding a jug above a
// matching pot long enough grows the plant. ColorMatches is the latent
// concept; without it every pot looks waterable by every jug.

#include "exo/env.hpp"
#include "exo/envs/given_listings.hpp"

namespace exo {

namespace grow_detail {

inline long fget(const FeatureState& fs, ObjectId o, const char* k) {
  return std::lround(fs.features[o].at(k));
}

inline void populate(const EnvironmentDef&, Task& t, RandomSource& rng) {
  Symbols& sym = t.sym;
  // train tasks share one object layout so their trajectories live in the
  // same universe; colors vary with the seed
  int n_pots = t.split == Split::kTrain ? 2 : 3;
  int n_jugs = t.split == Split::kTrain ? 2 : 1 + (int)rng.uniform_int(2);
  ObjectId r = sym.add_object("robot0", sym.type_id("robot"));
  std::vector<ObjectId> jugs, pots;
  for (int i = 0; i < n_jugs; ++i)
    jugs.push_back(
        sym.add_object("jug" + std::to_string(i), sym.type_id("jug")));
  for (int i = 0; i < n_pots; ++i)
    pots.push_back(
        sym.add_object("pot" + std::to_string(i), sym.type_id("cup")));
  t.feats.features.resize(sym.objects.size());
  t.feats.features[r]["holding"] = -1;
  for (ObjectId j : jugs) {
    t.feats.features[j]["on_table"] = 1;
    t.feats.features[j]["above_cup"] = -1;
    t.feats.features[j]["color"] = (double)rng.uniform_int(4);
  }
  for (ObjectId p : pots) {
    // every pot takes the color of some jug, so the task stays solvable
    ObjectId j = jugs[rng.uniform_int(jugs.size())];
    t.feats.features[p]["on_table"] = 1;
    t.feats.features[p]["grown"] = 0;
    t.feats.features[p]["color"] = t.feats.features[j]["color"];
  }
  for (ObjectId p : pots) t.goal_atoms.push_back({sym.pred_id("Grown"), {p}});
}

}  // namespace grow_detail

inline EnvironmentDef make_grow_env() {
  using grow_detail::fget;
  EnvironmentDef env;
  env.name = "grow";
  env.given_listing = given::grow_listing;
  env.start_preds = {"CupOnTable", "Grown",      "HandEmpty", "Holding",
                     "JugAboveCup", "JugOnTable", "NotAboveCup"};
  env.hidden_preds = {"ColorMatches"};
  env.catalog = {{"ColorMatches",
                  {"jug", "cup"},
                  "the jug's water color matches the pot's flower color",
                  "color_matches"}};
  env.train_task_count = 2;

  env.declare = [](Symbols& sym) {
    TypeId cup = sym.add_type("cup");
    TypeId jug = sym.add_type("jug");
    TypeId robot = sym.add_type("robot");
    sym.add_pred({"ColorMatches", {jug, cup}, "color_matches"});
    sym.add_pred({"CupOnTable", {cup}, "cup_on_table"});
    sym.add_pred({"Grown", {cup}, "grown"});
    sym.add_pred({"HandEmpty", {robot}, "hand_empty"});
    sym.add_pred({"Holding", {robot, jug}, "holding"});
    sym.add_pred({"JugAboveCup", {jug, cup}, "jug_above_cup"});
    sym.add_pred({"JugOnTable", {jug}, "jug_on_table"});
    sym.add_pred({"NotAboveCup", {robot, jug}, "not_above_cup"});
  };

  env.classifiers["color_matches"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "color") == fget(fs, a[1], "color");
  };
  env.classifiers["cup_on_table"] = [](const Symbols&, const FeatureState& fs,
                                       const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on_table") > 0.5;
  };
  env.classifiers["grown"] = [](const Symbols&, const FeatureState& fs,
                                const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("grown") > 0.5;
  };
  env.classifiers["hand_empty"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "holding") < 0;
  };
  env.classifiers["holding"] = [](const Symbols&, const FeatureState& fs,
                                  const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "holding") == a[1];
  };
  env.classifiers["jug_above_cup"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "above_cup") == a[1];
  };
  env.classifiers["jug_on_table"] = [](const Symbols&, const FeatureState& fs,
                                       const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on_table") > 0.5;
  };
  env.classifiers["not_above_cup"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[1], "above_cup") < 0;
  };

  env.derived = [](const Symbols&) { return DerivedRuleSet{}; };

  env.exogenous = [](const Symbols& sym) {
    std::vector<ProcessSchema> out;
    ProcessSchema s;
    s.name = "GrowPlant";
    s.endogenous = false;
    s.params = {{"?cup", sym.type_id("cup")},
                {"?jug", sym.type_id("jug")},
                {"?robot", sym.type_id("robot")}};
    s.cond_start = {{sym.pred_id("ColorMatches"), {1, 0}},
                    {sym.pred_id("CupOnTable"), {0}},
                    {sym.pred_id("Holding"), {2, 1}},
                    {sym.pred_id("JugAboveCup"), {1, 0}}};
    s.cond_overall = s.cond_start;
    s.add_eff = {{sym.pred_id("Grown"), {0}}};
    s.log_strength = 1.2238;
    s.delay = DelayDistribution::gaussian(30.6220, 6.7903);
    out.push_back(std::move(s));
    return out;
  };

  env.populate = grow_detail::populate;
  return env;
}

}  // namespace exo

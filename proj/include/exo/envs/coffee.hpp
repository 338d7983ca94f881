#pragma once

// Coffee: fill every cup. A jug placed in a running machine fills with
// coffee; a filled jug held above a cup fills that cup. JugFilled is the
// latent concept the agent has to invent to explain both delays.

#include "exo/env.hpp"
#include "exo/envs/given_listings.hpp"

namespace exo {

namespace coffee_detail {

inline long fget(const FeatureState& fs, ObjectId o, const char* k) {
  return std::lround(fs.features[o].at(k));
}

inline void populate(const EnvironmentDef&, Task& t, RandomSource& rng) {
  Symbols& sym = t.sym;
  int n_cups = t.split == Split::kTrain ? 1 : 2 + (int)rng.uniform_int(2);
  ObjectId r = sym.add_object("robot0", sym.type_id("robot"));
  ObjectId j = sym.add_object("jug0", sym.type_id("jug"));
  ObjectId m = sym.add_object("machine0", sym.type_id("coffee_machine"));
  std::vector<ObjectId> cups;
  for (int i = 0; i < n_cups; ++i)
    cups.push_back(
        sym.add_object("cup" + std::to_string(i), sym.type_id("cup")));
  t.feats.features.resize(sym.objects.size());
  t.feats.features[r]["holding"] = -1;
  t.feats.features[j]["at"] = 0;  // 0 table, 1 machine, 2 hand
  t.feats.features[j]["in_machine"] = -1;
  t.feats.features[j]["above_cup"] = -1;
  t.feats.features[j]["filled"] = 0;
  t.feats.features[m]["on"] = 0;
  for (ObjectId c : cups) {
    t.feats.features[c]["filled"] = 0;
    // cosmetic variation; no classifier reads these
    t.feats.features[c]["size"] = 1 + (double)rng.uniform_int(3);
    t.feats.features[c]["color"] = (double)rng.uniform_int(4);
  }
  for (ObjectId c : cups)
    t.goal_atoms.push_back({sym.pred_id("CupFilled"), {c}});
}

}  // namespace coffee_detail

inline EnvironmentDef make_coffee_env() {
  using coffee_detail::fget;
  EnvironmentDef env;
  env.name = "coffee";
  env.given_listing = given::coffee_listing;
  env.start_preds = {"CupFilled",    "HandEmpty", "Holding",
                     "JugAboveCup",  "JugInMachine", "MachineOn",
                     "NotAboveCup",  "OnTable"};
  env.hidden_preds = {"JugFilled"};
  env.catalog = {{"JugFilled",
                  {"jug"},
                  "the jug has been filled with coffee by the machine",
                  "jug_filled"}};
  env.train_task_count = 1;

  env.declare = [](Symbols& sym) {
    TypeId machine = sym.add_type("coffee_machine");
    TypeId cup = sym.add_type("cup");
    TypeId jug = sym.add_type("jug");
    TypeId robot = sym.add_type("robot");
    sym.add_pred({"CupFilled", {cup}, "cup_filled"});
    sym.add_pred({"HandEmpty", {robot}, "hand_empty"});
    sym.add_pred({"Holding", {robot, jug}, "holding"});
    sym.add_pred({"JugAboveCup", {jug, cup}, "jug_above_cup"});
    sym.add_pred({"JugFilled", {jug}, "jug_filled"});
    sym.add_pred({"JugInMachine", {jug, machine}, "jug_in_machine"});
    sym.add_pred({"MachineOn", {machine}, "machine_on"});
    sym.add_pred({"NotAboveCup", {robot, jug}, "not_above_cup"});
    sym.add_pred({"OnTable", {jug}, "on_table"});
  };

  env.classifiers["cup_filled"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("filled") > 0.5;
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
  env.classifiers["jug_filled"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("filled") > 0.5;
  };
  env.classifiers["jug_in_machine"] = [](const Symbols&, const FeatureState& fs,
                                         const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "in_machine") == a[1];
  };
  env.classifiers["machine_on"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on") > 0.5;
  };
  env.classifiers["not_above_cup"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[1], "above_cup") < 0;
  };
  env.classifiers["on_table"] = [](const Symbols&, const FeatureState& fs,
                                   const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "at") == 0;
  };

  env.derived = [](const Symbols&) { return DerivedRuleSet{}; };

  env.exogenous = [](const Symbols& sym) {
    std::vector<ProcessSchema> out;
    {
      ProcessSchema s;
      s.name = "FillJug";
      s.endogenous = false;
      s.params = {{"?machine", sym.type_id("coffee_machine")},
                  {"?jug", sym.type_id("jug")}};
      s.cond_start = {{sym.pred_id("JugInMachine"), {1, 0}},
                      {sym.pred_id("MachineOn"), {0}}};
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("JugFilled"), {1}}};
      s.log_strength = 1.7168;
      s.delay = DelayDistribution::gaussian(17.3098, 6.4991);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "FillCup";
      s.endogenous = false;
      s.params = {{"?cup", sym.type_id("cup")},
                  {"?jug", sym.type_id("jug")},
                  {"?robot", sym.type_id("robot")}};
      s.cond_start = {{sym.pred_id("Holding"), {2, 1}},
                      {sym.pred_id("JugAboveCup"), {1, 0}},
                      {sym.pred_id("JugFilled"), {1}}};
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("CupFilled"), {0}}};
      s.log_strength = 1.7250;
      s.delay = DelayDistribution::gaussian(4.5577, 1.8173);
      out.push_back(std::move(s));
    }
    return out;
  };

  env.populate = coffee_detail::populate;
  return env;
}

}  // namespace exo

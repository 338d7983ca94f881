#pragma once

// Boil: serve a human hot water. Filling happens under a running faucet,
// heating on a lit burner, and serving once everything is off and safe. An
// open faucet with no jug (or an already-full jug) underneath eventually
// spills, after which the human can never be served. JugIsFull, JugIsHot and
// NotSpilling are the latent concepts; the spill trigger itself is a derived
// disjunction over them.

#include "exo/env.hpp"
#include "exo/envs/given_listings.hpp"

namespace exo {

namespace boil_detail {

inline long fget(const FeatureState& fs, ObjectId o, const char* k) {
  return std::lround(fs.features[o].at(k));
}

// jug "at": 0 outside, 1 under the faucet, 2 on the burner, 3 in hand

inline void populate(const EnvironmentDef&, Task& t, RandomSource& rng) {
  Symbols& sym = t.sym;
  int n_jugs = t.split == Split::kTrain ? 1 : 1 + (int)rng.uniform_int(2);
  ObjectId r = sym.add_object("robot0", sym.type_id("robot"));
  ObjectId f = sym.add_object("faucet0", sym.type_id("faucet"));
  ObjectId b = sym.add_object("burner0", sym.type_id("burner"));
  ObjectId h = sym.add_object("human0", sym.type_id("human"));
  std::vector<ObjectId> jugs;
  for (int i = 0; i < n_jugs; ++i)
    jugs.push_back(
        sym.add_object("jug" + std::to_string(i), sym.type_id("jug")));
  t.feats.features.resize(sym.objects.size());
  t.feats.features[r]["holding"] = -1;
  t.feats.features[f]["on"] = 0;
  t.feats.features[f]["spilled"] = 0;
  t.feats.features[b]["on"] = 0;
  t.feats.features[h]["served_jug"] = -1;
  t.feats.features[h]["served_burner"] = -1;
  for (ObjectId j : jugs) {
    t.feats.features[j]["at"] = 0;
    t.feats.features[j]["full"] = 0;
    t.feats.features[j]["hot"] = 0;
  }
  ObjectId gj = jugs[rng.uniform_int(jugs.size())];
  t.goal_atoms.push_back({sym.pred_id("HumanHappy"), {h, gj, b}});
}

}  // namespace boil_detail

inline EnvironmentDef make_boil_env() {
  using boil_detail::fget;
  EnvironmentDef env;
  env.name = "boil";
  env.given_listing = given::boil_listing;
  env.start_preds = {"BurnerOff",   "BurnerOn",      "FaucetOff",
                     "FaucetOn",    "HandEmpty",     "Holding",
                     "HumanHappy",  "JugAtBurner",   "JugAtFaucet",
                     "JugNotAtBurnerOrFaucet", "NoJugAtBurner",
                     "NoJugAtFaucet"};
  env.hidden_preds = {"JugIsFull", "JugIsHot", "NotSpilling",
                      "NoJugAtFaucetOrAtFaucetAndFilled"};
  env.catalog = {
      {"JugIsFull", {"jug"}, "the jug has been filled with water",
       "jug_is_full"},
      {"JugIsHot", {"jug"}, "the water in the jug has been heated",
       "jug_is_hot"},
      {"NotSpilling", {"faucet"}, "no water has spilled at the faucet",
       "not_spilling"},
      {"NoJugAtFaucetOrAtFaucetAndFilled",
       {"faucet"},
       "either no jug sits under the faucet, or the jug there is already full",
       "NoJugAtFaucetOrAtFaucetAndFilled"}};
  env.train_task_count = 1;

  env.declare = [](Symbols& sym) {
    TypeId burner = sym.add_type("burner");
    TypeId faucet = sym.add_type("faucet");
    TypeId human = sym.add_type("human");
    TypeId jug = sym.add_type("jug");
    TypeId robot = sym.add_type("robot");
    sym.add_pred({"BurnerOff", {burner}, "burner_off"});
    sym.add_pred({"BurnerOn", {burner}, "burner_on"});
    sym.add_pred({"FaucetOff", {faucet}, "faucet_off"});
    sym.add_pred({"FaucetOn", {faucet}, "faucet_on"});
    sym.add_pred({"HandEmpty", {robot}, "hand_empty"});
    sym.add_pred({"Holding", {robot, jug}, "holding"});
    sym.add_pred({"HumanHappy", {human, jug, burner}, "human_happy"});
    sym.add_pred({"JugAtBurner", {jug, burner}, "jug_at_burner"});
    sym.add_pred({"JugAtFaucet", {jug, faucet}, "jug_at_faucet"});
    sym.add_pred({"JugIsFull", {jug}, "jug_is_full"});
    sym.add_pred({"JugIsHot", {jug}, "jug_is_hot"});
    sym.add_pred(
        {"JugNotAtBurnerOrFaucet", {jug}, "jug_not_at_burner_or_faucet"});
    sym.add_pred({"NoJugAtBurner", {burner}, "no_jug_at_burner"});
    sym.add_pred({"NoJugAtFaucet", {faucet}, "no_jug_at_faucet"});
    // derived, recomputed from base atoms
    sym.add_pred({"NoJugAtFaucetOrAtFaucetAndFilled", {faucet}, ""});
    sym.add_pred({"NotSpilling", {faucet}, "not_spilling"});
  };

  env.classifiers["burner_off"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on") < 0.5;
  };
  env.classifiers["burner_on"] = [](const Symbols&, const FeatureState& fs,
                                    const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on") > 0.5;
  };
  env.classifiers["faucet_off"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on") < 0.5;
  };
  env.classifiers["faucet_on"] = [](const Symbols&, const FeatureState& fs,
                                    const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("on") > 0.5;
  };
  env.classifiers["hand_empty"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "holding") < 0;
  };
  env.classifiers["holding"] = [](const Symbols&, const FeatureState& fs,
                                  const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "holding") == a[1];
  };
  env.classifiers["human_happy"] = [](const Symbols&, const FeatureState& fs,
                                      const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "served_jug") == a[1] &&
           fget(fs, a[0], "served_burner") == a[2];
  };
  env.classifiers["jug_at_burner"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "at") == 2;
  };
  env.classifiers["jug_at_faucet"] = [](const Symbols&, const FeatureState& fs,
                                        const std::vector<ObjectId>& a) {
    return fget(fs, a[0], "at") == 1;
  };
  env.classifiers["jug_is_full"] = [](const Symbols&, const FeatureState& fs,
                                      const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("full") > 0.5;
  };
  env.classifiers["jug_is_hot"] = [](const Symbols&, const FeatureState& fs,
                                     const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("hot") > 0.5;
  };
  env.classifiers["jug_not_at_burner_or_faucet"] =
      [](const Symbols&, const FeatureState& fs,
         const std::vector<ObjectId>& a) {
        return fget(fs, a[0], "at") == 0;
      };
  env.classifiers["no_jug_at_burner"] = [](const Symbols& sym,
                                           const FeatureState& fs,
                                           const std::vector<ObjectId>&) {
    TypeId jug = sym.type_id("jug");
    for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
      if (sym.objects[o].type == jug && fget(fs, o, "at") == 2) return false;
    return true;
  };
  env.classifiers["no_jug_at_faucet"] = [](const Symbols& sym,
                                           const FeatureState& fs,
                                           const std::vector<ObjectId>&) {
    TypeId jug = sym.type_id("jug");
    for (ObjectId o = 0; o < (ObjectId)sym.objects.size(); ++o)
      if (sym.objects[o].type == jug && fget(fs, o, "at") == 1) return false;
    return true;
  };
  env.classifiers["not_spilling"] = [](const Symbols&, const FeatureState& fs,
                                       const std::vector<ObjectId>& a) {
    return fs.features[a[0]].at("spilled") < 0.5;
  };

  env.derived = [](const Symbols& sym) {
    DerivedRuleSet rs;
    PredId head = sym.pred_id("NoJugAtFaucetOrAtFaucetAndFilled");
    {
      DerivedPredicateRule r;
      r.name = "NoJugAtFaucetOrAtFaucetAndFilled-empty";
      r.vars = {{"?faucet", sym.type_id("faucet")}};
      r.head = head;
      r.head_args = {0};
      r.body = {{sym.pred_id("NoJugAtFaucet"), {0}, true}};
      r.use_in_sim = true;
      r.use_in_rpg = true;
      rs.rules.push_back(std::move(r));
    }
    {
      DerivedPredicateRule r;
      r.name = "NoJugAtFaucetOrAtFaucetAndFilled-full";
      r.vars = {{"?faucet", sym.type_id("faucet")},
                {"?jug", sym.type_id("jug")}};
      r.head = head;
      r.head_args = {0};
      r.body = {{sym.pred_id("JugAtFaucet"), {1, 0}, true},
                {sym.pred_id("JugIsFull"), {1}, true}};
      r.use_in_sim = true;
      r.use_in_rpg = true;
      rs.rules.push_back(std::move(r));
    }
    rs.derived_preds = {head};
    return rs;
  };

  env.exogenous = [](const Symbols& sym) {
    std::vector<ProcessSchema> out;
    {
      ProcessSchema s;
      s.name = "FillJug";
      s.endogenous = false;
      s.params = {{"?faucet", sym.type_id("faucet")},
                  {"?jug", sym.type_id("jug")}};
      s.cond_start = {{sym.pred_id("FaucetOn"), {0}},
                      {sym.pred_id("JugAtFaucet"), {1, 0}}};
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("JugIsFull"), {1}}};
      s.log_strength = 1.2791;
      s.delay = DelayDistribution::gaussian(33.1148, 6.7873);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "HeatJug";
      s.endogenous = false;
      s.params = {{"?burner", sym.type_id("burner")},
                  {"?jug", sym.type_id("jug")}};
      s.cond_start = {{sym.pred_id("BurnerOn"), {0}},
                      {sym.pred_id("JugAtBurner"), {1, 0}},
                      {sym.pred_id("JugIsFull"), {1}}};
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("JugIsHot"), {1}}};
      s.log_strength = 1.9391;
      s.delay = DelayDistribution::gaussian(17.6401, 6.4452);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "ServeHuman";
      s.endogenous = false;
      s.params = {{"?burner", sym.type_id("burner")},
                  {"?faucet", sym.type_id("faucet")},
                  {"?human", sym.type_id("human")},
                  {"?jug", sym.type_id("jug")},
                  {"?robot", sym.type_id("robot")}};
      s.cond_start = {{sym.pred_id("BurnerOff"), {0}},
                      {sym.pred_id("FaucetOff"), {1}},
                      {sym.pred_id("HandEmpty"), {4}},
                      {sym.pred_id("JugIsFull"), {3}},
                      {sym.pred_id("JugIsHot"), {3}},
                      {sym.pred_id("NotSpilling"), {1}}};
      s.cond_overall = s.cond_start;
      s.add_eff = {{sym.pred_id("HumanHappy"), {2, 3, 0}}};
      s.log_strength = 1.9474;
      s.delay = DelayDistribution::gaussian(5.5717, 4.1486);
      out.push_back(std::move(s));
    }
    {
      ProcessSchema s;
      s.name = "SpillWater";
      s.endogenous = false;
      s.params = {{"?faucet", sym.type_id("faucet")}};
      s.cond_start = {
          {sym.pred_id("FaucetOn"), {0}},
          {sym.pred_id("NoJugAtFaucetOrAtFaucetAndFilled"), {0}},
          {sym.pred_id("NotSpilling"), {0}}};
      s.cond_overall = s.cond_start;
      s.del_eff = {{sym.pred_id("NotSpilling"), {0}}};
      s.log_strength = 2.0;
      s.delay = DelayDistribution::gaussian(5.0, 1.0);
      out.push_back(std::move(s));
    }
    return out;
  };

  env.populate = boil_detail::populate;
  return env;
}

}  // namespace exo

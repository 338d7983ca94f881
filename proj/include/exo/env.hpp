#pragma once

// Symbolic tabletop environments. Each environment bundles a typed predicate
// vocabulary with feature classifiers, the given endogenous skills, hidden
// exogenous processes, derived-predicate rules, and seeded task generation.
// The full process model drives the simulator directly; there is no separate
// physics underneath.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "exo/delay.hpp"
#include "exo/derived.hpp"
#include "exo/listing.hpp"
#include "exo/planner.hpp"
#include "exo/process.hpp"
#include "exo/propose.hpp"
#include "exo/random.hpp"
#include "exo/symbols.hpp"
#include "exo/trajectory.hpp"
#include "exo/world.hpp"

namespace exo {

enum class Split { kTrain, kTest };

inline const char* split_str(Split s) {
  return s == Split::kTrain ? "train" : "test";
}

inline Split parse_split(const std::string& s) {
  if (s == "train") return Split::kTrain;
  if (s == "test") return Split::kTest;
  throw std::runtime_error("unknown split: " + s);
}

// Truth of one ground atom, read off object features.
using Classifier = std::function<bool(
    const Symbols&, const FeatureState&, const std::vector<ObjectId>&)>;

// One concrete task: objects with features, initial atoms, and a goal.
struct Task {
  std::string domain;
  Split split = Split::kTrain;
  uint64_t seed = 0;
  bool impossible = false;  // tagged unsolvable by construction
  Symbols sym;
  TaskUniverse uni;
  FeatureState feats;
  AbstractState init;  // classifier truth with derived atoms refreshed
  std::vector<GroundAtom> goal_atoms;
  std::vector<AtomId> goal;
  DerivedRuleSet rules;
};

struct EnvironmentDef {
  std::string name;
  std::string given_listing;  // textual start model (endogenous skills)
  // Predicates visible to the agent from the start.
  std::vector<std::string> start_preds;
  // Latent concepts the agent may invent; each appears in the catalog.
  std::vector<std::string> hidden_preds;
  // Simulator bookkeeping (static geometry); visible in observations but
  // excluded from learned vocabularies and never proposed.
  std::vector<std::string> internal_preds;
  std::vector<ConceptSpec> catalog;
  int train_task_count = 1;
  // Fraction of test tasks generated with an unsatisfiable goal (tagged
  // `impossible`); 0 disables.
  double impossible_fraction = 0.0;
  std::map<std::string, Classifier> classifiers;
  std::function<void(Symbols&)> declare;  // types + predicates, fixed order
  std::function<DerivedRuleSet(const Symbols&)> derived;
  std::function<std::vector<ProcessSchema>(const Symbols&)> exogenous;
  // Fills objects, features, goal_atoms, and the impossible tag.
  std::function<void(const EnvironmentDef&, Task&, RandomSource&)> populate;
};

// ---------------------------------------------------------------------------
// models

// Parse the given listing against a declared vocabulary. Parsing must not add
// any predicate or type the environment did not declare.
inline ProcessModel given_model(const EnvironmentDef& env, const Symbols& sym) {
  Symbols tmp = sym;
  std::vector<ParsedListing> parsed = parse_listings(env.given_listing, tmp);
  if (tmp.preds.size() != sym.preds.size() ||
      tmp.types.size() != sym.types.size())
    throw std::runtime_error(env.name +
                             ": listing references undeclared symbols");
  ProcessModel m;
  for (ParsedListing& p : parsed) m.schemas.push_back(std::move(p.schema));
  return m;
}

// The hand-specified full model: given skills plus the true exogenous
// processes. This same model is what the simulator runs.
inline ProcessModel manual_model(const EnvironmentDef& env,
                                 const Symbols& sym) {
  ProcessModel m = given_model(env, sym);
  for (ProcessSchema& s : env.exogenous(sym)) m.schemas.push_back(std::move(s));
  return m;
}

// Ablated variant with every delay collapsed to one tick.
inline ProcessModel constant_delay_variant(ProcessModel m) {
  for (ProcessSchema& s : m.schemas) s.delay = DelayDistribution::constant(1.0);
  return m;
}

// ---------------------------------------------------------------------------
// task construction

inline AbstractState initial_atoms(const EnvironmentDef& env, const Task& t) {
  AbstractState s((int)t.uni.size());
  for (AtomId a = 0; a < (AtomId)t.uni.size(); ++a) {
    const GroundAtom& g = t.uni.atoms[a];
    const std::string& key = t.sym.preds[g.pred].classifier;
    if (key.empty()) continue;  // derived; refreshed below
    auto it = env.classifiers.find(key);
    if (it == env.classifiers.end())
      throw std::runtime_error(env.name + ": no classifier for key " + key);
    if (it->second(t.sym, t.feats, g.args)) s.set(a);
  }
  refresh_derived(t.sym, t.uni, t.rules, s);
  return s;
}

// Build the universe, initial state, and goal ids once objects and features
// are in place.
inline void finish_task(const EnvironmentDef& env, Task& t) {
  std::vector<PredId> all;
  for (PredId p = 0; p < (PredId)t.sym.preds.size(); ++p) all.push_back(p);
  t.uni = atom_universe(t.sym, all);
  t.uni.sym = &t.sym;
  t.rules = env.derived(t.sym);
  t.init = initial_atoms(env, t);
  t.goal.clear();
  for (const GroundAtom& g : t.goal_atoms) t.goal.push_back(t.uni.id_of(g));
}

inline uint64_t task_rng_seed(const std::string& name, Split split,
                              uint64_t seed) {
  uint64_t h = 1469598103934665603ull;
  for (char c : name) h = (h ^ (uint64_t)(unsigned char)c) * 1099511628211ull;
  uint64_t z = h ^ (seed * 2 + (split == Split::kTest ? 1 : 0));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

// Tasks live on the heap so worlds can hold pointers into them.
inline std::shared_ptr<Task> make_task(const EnvironmentDef& env, Split split,
                                       uint64_t seed) {
  auto t = std::make_shared<Task>();
  t->domain = env.name;
  t->split = split;
  t->seed = seed;
  env.declare(t->sym);
  RandomSource rng(task_rng_seed(env.name, split, seed));
  env.populate(env, *t, rng);
  finish_task(env, *t);
  return t;
}

// ---------------------------------------------------------------------------
// observation masking

inline std::set<PredId> pred_set(const Symbols& sym,
                                 const std::vector<std::string>& names) {
  std::set<PredId> out;
  for (const std::string& n : names) out.insert(sym.pred_id(n));
  return out;
}

// What the agent's perception reports: everything except hidden concepts it
// has not adopted. Internal geometry stays visible.
inline std::set<PredId> observed_preds(const EnvironmentDef& env,
                                       const Symbols& sym,
                                       const std::set<std::string>& adopted) {
  std::set<PredId> out;
  for (PredId p = 0; p < (PredId)sym.preds.size(); ++p) out.insert(p);
  for (const std::string& n : env.hidden_preds)
    if (!adopted.count(n)) out.erase(sym.pred_id(n));
  return out;
}

// Atoms eligible for model learning: observations minus internal geometry.
inline std::set<PredId> learner_preds(const EnvironmentDef& env,
                                      const Symbols& sym,
                                      const std::set<std::string>& adopted) {
  std::set<PredId> out = observed_preds(env, sym, adopted);
  for (const std::string& n : env.internal_preds) out.erase(sym.pred_id(n));
  return out;
}

inline AbstractState mask_atoms(const TaskUniverse& uni,
                                const AbstractState& s,
                                const std::set<PredId>& visible) {
  AbstractState out = s;
  for (AtomId a = 0; a < (AtomId)uni.size(); ++a)
    if (!visible.count(uni.atoms[a].pred)) out.reset(a);
  return out;
}

inline Trajectory mask_trajectory(const Trajectory& tr, const TaskUniverse& uni,
                                  const std::set<PredId>& visible) {
  Trajectory out = tr;
  for (AbstractState& s : out.states) s = mask_atoms(uni, s, visible);
  return out;
}

// ---------------------------------------------------------------------------
// worlds

// A task with one process model wired into a simulable world. Heap-allocated
// so the world's internal pointers stay valid.
struct TaskWorld {
  std::shared_ptr<const Task> task;
  ProcessModel model;
  DerivedRuleSet rules;
  Grounding grounding;
  World world;
};

inline std::shared_ptr<TaskWorld> wire_world(std::shared_ptr<const Task> task,
                                             ProcessModel model,
                                             DerivedRuleSet rules) {
  auto tw = std::make_shared<TaskWorld>();
  tw->task = std::move(task);
  tw->model = std::move(model);
  tw->rules = std::move(rules);
  tw->grounding = ground_all(tw->task->sym, tw->task->uni, tw->model,
                             tw->task->init, tw->rules.derived_preds);
  tw->world = {&tw->task->sym, &tw->task->uni, &tw->grounding, &tw->rules};
  return tw;
}

// The simulator: the task wired to the full hand-specified model.
inline std::shared_ptr<TaskWorld> ground_truth_world(
    const EnvironmentDef& env, std::shared_ptr<const Task> task) {
  ProcessModel m = manual_model(env, task->sym);
  DerivedRuleSet r = task->rules;
  return wire_world(std::move(task), std::move(m), std::move(r));
}

inline bool goal_reached(const Task& t, const AbstractState& s) {
  if (t.goal.empty()) return false;
  for (AtomId a : t.goal)
    if (!s.test(a)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// acting

// Distinct (skill, args) pairs whose start conditions hold, the no-op
// included. Exploration draws uniformly from these.
inline std::vector<std::pair<std::string, std::vector<ObjectId>>>
applicable_commands(const TaskWorld& tw, const AbstractState& atoms) {
  std::set<std::pair<std::string, std::vector<ObjectId>>> seen;
  for (const GroundProcess& gp : tw.grounding.processes) {
    const ProcessSchema& s = tw.model.schemas[gp.schema];
    if (!s.endogenous) continue;
    if (!cond_holds(gp.cond_start, atoms)) continue;
    std::vector<ObjectId> args;
    for (int k : s.option.args) args.push_back(gp.binding[k]);
    seen.insert({s.option.skill, std::move(args)});
  }
  return {seen.begin(), seen.end()};
}

struct SkillResult {
  bool ok = false;         // conditions held and the process activated
  bool completed = false;  // the effect event executed within the cap
  int steps = 0;
};

// Issue one skill against a world. Unknown skills are an error; unmet start
// conditions report failure and leave the state untouched.
inline SkillResult execute_skill(const TaskWorld& tw, WorldState& ws,
                                 const std::string& skill,
                                 const std::vector<ObjectId>& args,
                                 RandomSource& rng, Trajectory* traj = nullptr,
                                 int k_max = 300) {
  bool known = false;
  for (const ProcessSchema& s : tw.model.schemas)
    if (s.endogenous && s.option.skill == skill) known = true;
  if (!known) throw std::runtime_error("unknown skill: " + skill);

  WorldState before = ws;
  size_t traj_states = traj ? traj->states.size() : 0;
  size_t traj_cmds = traj ? traj->commands.size() : 0;
  StepCommand cmd = StepCommand::make(skill, args);
  BigStepResult r;
  if (traj)
    r = record_step(tw.world, ws, cmd, rng, *traj, StepMode::kSample, k_max);
  else
    r = big_step(tw.world, ws, cmd, rng, StepMode::kSample, k_max);
  if (r.activation_failed) {
    ws = before;
    if (traj) {
      traj->states.resize(traj_states);
      traj->commands.resize(traj_cmds);
    }
    return {false, false, 0};
  }
  return {true, r.completed, r.steps};
}

// ---------------------------------------------------------------------------
// episodes

struct EpisodeOptions {
  PlanBudget plan;
  int max_steps = 300;     // simulator ticks per episode
  int max_replans = 25;
  int k_max = 300;         // per big step
  std::set<PredId> observe;  // agent observation vocabulary; empty = all
};

struct EpisodeResult {
  bool success = false;
  bool unreachable = false;  // the agent's planner proved the goal out of reach
  bool timeout = false;      // planner or step budget exhausted
  int commands = 0;
  int replans = 0;
  int steps = 0;
  double plan_seconds = 0.0;
  Trajectory traj;
};

// Plan with the agent model, execute on the ground-truth world, and replan
// whenever the observed outcome of a big step differs from the agent's
// expected-mode prediction.
inline EpisodeResult run_episode(const TaskWorld& gt, const TaskWorld& agent,
                                 RandomSource& rng,
                                 const EpisodeOptions& opt = {}) {
  const Task& task = *gt.task;
  EpisodeResult res;
  res.traj.env = task.domain;
  res.traj.seed = task.seed;
  auto mask = [&](const AbstractState& s) {
    return opt.observe.empty() ? s : mask_atoms(task.uni, s, opt.observe);
  };

  WorldState gws = world_init(gt.world, task.init, rng, StepMode::kSample);
  res.traj.states.push_back(gws.atoms);
  if (goal_reached(task, gws.atoms)) {
    res.success = true;
    return res;
  }

  RandomSource dummy(0);  // expected mode never draws
  for (int round = 0; round <= opt.max_replans; ++round) {
    if (round > 0) res.replans++;
    WorldState aws =
        world_init(agent.world, mask(gws.atoms), dummy, StepMode::kExpected);
    PlanResult pr = astar_plan(agent.world, aws, task.goal, opt.plan);
    res.plan_seconds += pr.seconds;
    if (pr.status == PlanStatus::kUnreachable) {
      res.unreachable = true;
      return res;
    }
    if (pr.status == PlanStatus::kTimeout) {
      res.timeout = true;
      return res;
    }
    if (pr.commands.empty()) return res;  // planner is stuck; give up

    bool diverged = false;
    for (const StepCommand& cmd : pr.commands) {
      int room = opt.max_steps - res.steps;
      if (room <= 0) {
        res.timeout = true;
        return res;
      }
      BigStepResult gr = record_step(gt.world, gws, cmd, rng, res.traj,
                                     StepMode::kSample,
                                     std::min(opt.k_max, room));
      res.commands++;
      res.steps = (int)res.traj.states.size() - 1;
      BigStepResult ar =
          big_step(agent.world, aws, cmd, dummy, StepMode::kExpected,
                   opt.k_max);
      if (goal_reached(task, gws.atoms)) {
        res.success = true;
        return res;
      }
      if (!gr.completed || !ar.completed ||
          mask(gws.atoms) != mask(aws.atoms)) {
        diverged = true;
        break;
      }
    }
    (void)diverged;  // either way the next round replans from the new state
  }
  return res;
}

// Expert demonstration: the hand-specified model plans and executes on its
// own simulator, retrying with fresh randomness on bad luck.
inline EpisodeResult scripted_demo(const EnvironmentDef& env,
                                   std::shared_ptr<const Task> task,
                                   uint64_t seed, int attempts = 5) {
  auto gt = ground_truth_world(env, task);
  RandomSource root(task_rng_seed(env.name + "/demo", task->split,
                                  seed * 131 + task->seed));
  EpisodeResult last;
  for (int a = 0; a < attempts; ++a) {
    RandomSource rng = root.fork(a);
    last = run_episode(*gt, *gt, rng);
    if (last.success) break;
  }
  return last;
}

// Uniform-random exploration over applicable commands.
inline Trajectory random_rollout(const TaskWorld& tw, RandomSource& rng,
                                 int max_steps = 300, int noop_cap = 60) {
  Trajectory traj;
  traj.env = tw.task->domain;
  traj.seed = tw.task->seed;
  WorldState ws = world_init(tw.world, tw.task->init, rng, StepMode::kSample);
  traj.states.push_back(ws.atoms);
  while ((int)traj.states.size() - 1 < max_steps) {
    auto cmds = applicable_commands(tw, ws.atoms);
    if (cmds.empty()) break;
    const auto& [skill, args] = cmds[rng.uniform_int(cmds.size())];
    int room = max_steps - ((int)traj.states.size() - 1);
    int cap = skill == "NoOp" ? std::min(noop_cap, room) : room;
    record_step(tw.world, ws, StepCommand::make(skill, args), rng, traj,
                StepMode::kSample, cap);
  }
  return traj;
}

// ---------------------------------------------------------------------------
// task files

inline std::string format_feature(double v) {
  long r = std::lround(v);
  if ((double)r == v) return std::to_string(r);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

inline std::string print_task(const Task& t) {
  std::ostringstream out;
  out << "task " << t.domain << " " << split_str(t.split) << " " << t.seed
      << "\n";
  if (t.impossible) out << "impossible\n";
  for (ObjectId o = 0; o < (ObjectId)t.sym.objects.size(); ++o)
    out << "object " << t.sym.objects[o].name << " "
        << t.sym.types[t.sym.objects[o].type].name << "\n";
  for (ObjectId o = 0; o < (ObjectId)t.sym.objects.size(); ++o) {
    if (o >= (ObjectId)t.feats.features.size()) break;
    for (const auto& [key, v] : t.feats.features[o])
      out << "feature " << t.sym.objects[o].name << " " << key << " "
          << format_feature(v) << "\n";
  }
  for (const GroundAtom& g : t.goal_atoms)
    out << "goal " << atom_str(t.sym, g) << "\n";
  return out.str();
}

inline GroundAtom parse_ground_atom(const Symbols& sym,
                                    const std::string& text) {
  size_t open = text.find('(');
  size_t close = text.rfind(')');
  if (open == std::string::npos || close == std::string::npos || close < open)
    throw std::runtime_error("bad atom: " + text);
  GroundAtom g;
  g.pred = sym.pred_id(text.substr(0, open));
  std::string inner = text.substr(open + 1, close - open - 1);
  std::istringstream in(inner);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    size_t b = tok.find_first_not_of(" \t");
    size_t e = tok.find_last_not_of(" \t");
    if (b == std::string::npos) continue;
    g.args.push_back(sym.object_id(tok.substr(b, e - b + 1)));
  }
  return g;
}

inline std::shared_ptr<Task> parse_task(const EnvironmentDef& env,
                                        const std::string& text) {
  auto t = std::make_shared<Task>();
  env.declare(t->sym);
  std::istringstream in(text);
  std::string line;
  std::vector<std::string> goal_lines;
  bool header = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string kind;
    if (!(ls >> kind)) continue;
    if (kind == "task") {
      std::string dom, split;
      ls >> dom >> split >> t->seed;
      if (dom != env.name)
        throw std::runtime_error("task file is for environment " + dom);
      t->domain = dom;
      t->split = parse_split(split);
      header = true;
    } else if (kind == "impossible") {
      t->impossible = true;
    } else if (kind == "object") {
      std::string name, type;
      ls >> name >> type;
      ObjectId o = t->sym.add_object(name, t->sym.type_id(type));
      if ((ObjectId)t->feats.features.size() <= o)
        t->feats.features.resize(o + 1);
    } else if (kind == "feature") {
      std::string name, key;
      double v;
      ls >> name >> key >> v;
      t->feats.features[t->sym.object_id(name)][key] = v;
    } else if (kind == "goal") {
      std::string rest;
      std::getline(ls, rest);
      size_t b = rest.find_first_not_of(" \t");
      goal_lines.push_back(rest.substr(b));
    } else {
      throw std::runtime_error("task file: unknown line kind " + kind);
    }
  }
  if (!header) throw std::runtime_error("task file has no header");
  for (const std::string& s : goal_lines)
    t->goal_atoms.push_back(parse_ground_atom(t->sym, s));
  finish_task(env, *t);
  return t;
}

}  // namespace exo

#pragma once

// Recorded experience: the state after every small step plus the commands
// issued at big-step boundaries. States are full registry states; learners
// mask them down to whatever predicate set they currently entertain.

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "exo/world.hpp"

namespace exo {

struct TrajCommand {
  int t = 0;  // world time when the command was issued
  std::string skill;
  std::vector<ObjectId> args;
  bool ok = false;         // activation succeeded
  bool completed = false;  // big step reported completion
};

struct Trajectory {
  std::string env;
  uint64_t seed = 0;
  std::vector<AbstractState> states;  // s_0 .. s_T
  std::vector<TrajCommand> commands;

  int horizon() const { return (int)states.size() - 1; }
};

// Issue one command through big_step and append everything observed.
inline BigStepResult record_step(const World& w, WorldState& ws,
                                 const StepCommand& cmd, RandomSource& rng,
                                 Trajectory& traj,
                                 StepMode mode = StepMode::kSample,
                                 int k_max = 300) {
  if (traj.states.empty()) traj.states.push_back(ws.atoms);
  TrajCommand tc;
  tc.t = ws.t;
  tc.skill = cmd.skill;
  tc.args = cmd.args;
  BigStepResult res =
      big_step(w, ws, cmd, rng, mode, k_max, &traj.states);
  tc.ok = !res.activation_failed;
  tc.completed = res.completed;
  traj.commands.push_back(std::move(tc));
  return res;
}

inline void save_trajectory(const std::string& path, const Trajectory& traj,
                            const Symbols& sym, const TaskUniverse& universe) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  nlohmann::json header;
  header["type"] = "header";
  header["env"] = traj.env;
  header["seed"] = traj.seed;
  std::vector<std::string> names;
  for (const GroundAtom& a : universe.atoms) names.push_back(atom_str(sym, a));
  header["atoms"] = names;
  out << header.dump() << "\n";
  for (size_t t = 0; t < traj.states.size(); ++t) {
    nlohmann::json row;
    row["type"] = "state";
    row["t"] = t;
    row["on"] = traj.states[t].to_ids();
    out << row.dump() << "\n";
  }
  for (const TrajCommand& c : traj.commands) {
    nlohmann::json row;
    row["type"] = "cmd";
    row["t"] = c.t;
    row["skill"] = c.skill;
    std::vector<std::string> args;
    for (ObjectId o : c.args) args.push_back(sym.objects[o].name);
    row["args"] = args;
    row["ok"] = c.ok;
    row["completed"] = c.completed;
    out << row.dump() << "\n";
  }
}

inline Trajectory load_trajectory(const std::string& path, const Symbols& sym,
                                  const TaskUniverse& universe) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  Trajectory traj;
  std::vector<std::string> names;
  for (const GroundAtom& a : universe.atoms) names.push_back(atom_str(sym, a));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    nlohmann::json row = nlohmann::json::parse(line);
    std::string type = row.at("type");
    if (type == "header") {
      traj.env = row.at("env");
      traj.seed = row.at("seed");
      std::vector<std::string> stored = row.at("atoms");
      if (stored != names)
        throw std::runtime_error("trajectory universe mismatch: " + path);
    } else if (type == "state") {
      int t = row.at("t");
      if ((int)traj.states.size() != t)
        throw std::runtime_error("trajectory states out of order: " + path);
      AbstractState s(universe.size());
      for (int id : row.at("on")) s.set(id);
      traj.states.push_back(std::move(s));
    } else if (type == "cmd") {
      TrajCommand c;
      c.t = row.at("t");
      c.skill = row.at("skill");
      for (const std::string& name : row.at("args"))
        c.args.push_back(sym.object_id(name));
      c.ok = row.at("ok");
      c.completed = row.at("completed");
      traj.commands.push_back(std::move(c));
    }
  }
  return traj;
}

}  // namespace exo

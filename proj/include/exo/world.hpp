#pragma once

// Small-step and big-step semantics.
//
// One small step advances the world from time t to t+1 in three stages:
//   1. Events whose end time is t+1 execute in canonical key order (deletes
//      then adds per event); derived atoms are refreshed afterwards.
//   2. Activation. The issued command activates matching endogenous processes
//      whose start conditions hold in the post-effect state (a failed match is
//      recorded in the report, not an error). Exogenous processes activate on
//      a rising edge: start conditions hold now but did not at the beginning
//      of this step. A delay d >= 1 is drawn and the event is scheduled to
//      end at (t+1)+d. At most one event per ground exogenous process is
//      pending at a time.
//   3. Overall-condition maintenance: every pending event started before t+1
//      is checked against the new state; violators are cancelled.
//
// A big step issues one command and runs small steps until the command's
// event has executed. NoOp instead waits until the atom set differs from the
// snapshot taken at initiation. Either way a cap of k_max small steps applies.

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "exo/derived.hpp"
#include "exo/process.hpp"
#include "exo/random.hpp"

namespace exo {

struct ScheduledEvent {
  int process = -1;  // index into Grounding::processes
  int t_start = 0;
  int t_end = 0;
  long serial = -1;  // unique per world, for tracking through reports
};

struct StepCommand {
  bool none = true;
  std::string skill;
  std::vector<ObjectId> args;

  static StepCommand make(std::string skill, std::vector<ObjectId> args) {
    return {false, std::move(skill), std::move(args)};
  }
  static StepCommand idle() { return {}; }
  bool is_noop() const { return !none && skill == "NoOp"; }
};

enum class StepMode { kSample, kExpected };

struct StepReport {
  std::vector<ScheduledEvent> executed;
  std::vector<ScheduledEvent> scheduled;
  std::vector<ScheduledEvent> cancelled;
  bool activation_attempted = false;
  bool activation_ok = false;
  std::vector<long> activated_serials;
};

struct World {
  const Symbols* sym = nullptr;
  const TaskUniverse* universe = nullptr;
  const Grounding* grounding = nullptr;
  const DerivedRuleSet* rules = nullptr;
  int delay_horizon = 1000;
};

struct WorldState {
  int t = 0;
  AbstractState atoms;
  std::vector<ScheduledEvent> queue;
  long next_serial = 0;
};

namespace detail {

inline int draw_delay(const World& w, const ProcessSchema& schema,
                      RandomSource& rng, StepMode mode) {
  if (mode == StepMode::kExpected) return expected_delay(schema.delay);
  return sample_delay(schema.delay, w.delay_horizon, rng);
}

inline void schedule(const World& w, WorldState& ws, int process, int t_start,
                     RandomSource& rng, StepMode mode, StepReport* report) {
  const GroundProcess& gp = w.grounding->processes[process];
  const ProcessSchema& schema = w.grounding->model->schemas[gp.schema];
  ScheduledEvent ev;
  ev.process = process;
  ev.t_start = t_start;
  ev.t_end = t_start + draw_delay(w, schema, rng, mode);
  ev.serial = ws.next_serial++;
  ws.queue.push_back(ev);
  if (report) {
    report->scheduled.push_back(ev);
    report->activated_serials.push_back(ev.serial);
  }
}

inline bool pending_for(const WorldState& ws, int process) {
  for (const ScheduledEvent& ev : ws.queue)
    if (ev.process == process) return true;
  return false;
}

}  // namespace detail

// Initial world: derived atoms refreshed, then every exogenous process whose
// start conditions hold is scheduled (time-zero rising edge).
inline WorldState world_init(const World& w, const AbstractState& base_atoms,
                             RandomSource& rng,
                             StepMode mode = StepMode::kSample) {
  WorldState ws;
  ws.atoms = base_atoms;
  if (w.rules) refresh_derived(*w.sym, *w.universe, *w.rules, ws.atoms);
  const ProcessModel& model = *w.grounding->model;
  for (int pi = 0; pi < (int)w.grounding->processes.size(); ++pi) {
    const GroundProcess& gp = w.grounding->processes[pi];
    if (model.schemas[gp.schema].endogenous) continue;
    if (cond_holds(gp.cond_start, ws.atoms))
      detail::schedule(w, ws, pi, 0, rng, mode, nullptr);
  }
  return ws;
}

inline StepReport small_step(const World& w, WorldState& ws,
                             const StepCommand& cmd, RandomSource& rng,
                             StepMode mode = StepMode::kSample) {
  const ProcessModel& model = *w.grounding->model;
  StepReport report;
  AbstractState s_pre = ws.atoms;
  int t_next = ws.t + 1;

  // stage 1: execute due events in canonical key order
  std::vector<ScheduledEvent> due;
  for (const ScheduledEvent& ev : ws.queue)
    if (ev.t_end == t_next) due.push_back(ev);
  std::sort(due.begin(), due.end(),
            [&](const ScheduledEvent& a, const ScheduledEvent& b) {
              const std::string& ka = w.grounding->processes[a.process].key;
              const std::string& kb = w.grounding->processes[b.process].key;
              if (ka != kb) return ka < kb;
              return a.serial < b.serial;
            });
  bool touched = false;
  for (const ScheduledEvent& ev : due) {
    const GroundProcess& gp = w.grounding->processes[ev.process];
    for (AtomId a : gp.del_eff) ws.atoms.reset(a);
    for (AtomId a : gp.add_eff) ws.atoms.set(a);
    touched = touched || !gp.del_eff.empty() || !gp.add_eff.empty();
    report.executed.push_back(ev);
  }
  if (!due.empty())
    std::erase_if(ws.queue, [&](const ScheduledEvent& ev) {
      return ev.t_end == t_next;
    });
  if (touched && w.rules && !w.rules->empty())
    refresh_derived(*w.sym, *w.universe, *w.rules, ws.atoms);

  // stage 2: activation
  if (!cmd.none) {
    report.activation_attempted = true;
    for (int si = 0; si < (int)model.schemas.size(); ++si) {
      const ProcessSchema& schema = model.schemas[si];
      if (!schema.endogenous || schema.option.skill != cmd.skill) continue;
      for (int pi : w.grounding->by_schema[si]) {
        const GroundProcess& gp = w.grounding->processes[pi];
        if (schema.option.args.size() != cmd.args.size()) continue;
        bool match = true;
        for (size_t k = 0; k < cmd.args.size(); ++k)
          if (gp.binding[schema.option.args[k]] != cmd.args[k]) {
            match = false;
            break;
          }
        if (!match || !cond_holds(gp.cond_start, ws.atoms)) continue;
        report.activation_ok = true;
        detail::schedule(w, ws, pi, t_next, rng, mode, &report);
      }
    }
  }
  for (int pi = 0; pi < (int)w.grounding->processes.size(); ++pi) {
    const GroundProcess& gp = w.grounding->processes[pi];
    if (model.schemas[gp.schema].endogenous) continue;
    if (!cond_holds(gp.cond_start, ws.atoms)) continue;
    if (cond_holds(gp.cond_start, s_pre)) continue;  // no rising edge
    if (detail::pending_for(ws, pi)) continue;
    detail::schedule(w, ws, pi, t_next, rng, mode, nullptr);
    report.scheduled.push_back(ws.queue.back());
  }

  // stage 3: overall maintenance on events started before t+1
  std::vector<ScheduledEvent> kept;
  kept.reserve(ws.queue.size());
  for (const ScheduledEvent& ev : ws.queue) {
    const GroundProcess& gp = w.grounding->processes[ev.process];
    if (ev.t_start < t_next && !cond_holds(gp.cond_overall, ws.atoms))
      report.cancelled.push_back(ev);
    else
      kept.push_back(ev);
  }
  ws.queue = std::move(kept);
  ws.t = t_next;
  return report;
}

struct BigStepResult {
  bool completed = false;
  bool activation_failed = false;
  int steps = 0;
  std::vector<StepReport> reports;
};

inline BigStepResult big_step(const World& w, WorldState& ws,
                              const StepCommand& cmd, RandomSource& rng,
                              StepMode mode = StepMode::kSample,
                              int k_max = 300,
                              std::vector<AbstractState>* state_log = nullptr) {
  BigStepResult res;
  AbstractState snapshot = ws.atoms;
  bool noop = cmd.is_noop();
  std::vector<long> tracked;
  for (int k = 0; k < k_max; ++k) {
    StepReport rep = small_step(w, ws, k == 0 ? cmd : StepCommand::idle(), rng, mode);
    if (state_log) state_log->push_back(ws.atoms);
    res.steps++;
    if (k == 0) {
      if (rep.activation_attempted && !rep.activation_ok) {
        res.activation_failed = true;
        res.reports.push_back(std::move(rep));
        return res;
      }
      tracked = rep.activated_serials;
    }
    bool done = false;
    if (noop) {
      done = ws.atoms != snapshot;
    } else {
      // completed when every activated event has executed; cancelled events
      // terminate the big step unsuccessfully
      bool any_cancelled = false;
      for (const ScheduledEvent& ev : rep.cancelled)
        for (long s : tracked)
          if (ev.serial == s) any_cancelled = true;
      if (any_cancelled) {
        res.reports.push_back(std::move(rep));
        return res;
      }
      bool all_gone = true;
      for (long s : tracked) {
        for (const ScheduledEvent& ev : ws.queue)
          if (ev.serial == s) {
            all_gone = false;
            break;
          }
        if (!all_gone) break;
      }
      done = all_gone;
    }
    res.reports.push_back(std::move(rep));
    if (done) {
      res.completed = true;
      return res;
    }
  }
  return res;  // k_max exhausted
}

}  // namespace exo

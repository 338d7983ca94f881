#pragma once
// Greedy predicate-subset selection over a candidate pool. Structure learning
// runs once with every pool predicate visible in the data; candidate subsets
// then only gate which learned processes remain usable. The likelihood is
// always evaluated on the full pool's atom universe, so subset scores differ
// exactly by what the gated processes explain plus the priors.

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "exo/likelihood.hpp"
#include "exo/structure.hpp"
#include "exo/symbols.hpp"
#include "exo/trajectory.hpp"

namespace exo {

struct CandidatePool {
  // builtin and goal predicates, always usable and never penalized
  std::vector<PredId> always;
  // selectable predicates, kept sorted by name for deterministic tie-breaks
  std::vector<PredId> candidates;
  std::vector<bool> from_proposer;  // parallel to candidates
};

inline CandidatePool make_pool(
    const Symbols& sym, std::vector<PredId> always,
    const std::vector<std::pair<PredId, bool>>& candidates) {
  CandidatePool pool;
  std::sort(always.begin(), always.end());
  always.erase(std::unique(always.begin(), always.end()), always.end());
  pool.always = std::move(always);
  std::vector<std::pair<PredId, bool>> cs;
  for (auto [p, prov] : candidates) {
    if (std::binary_search(pool.always.begin(), pool.always.end(), p))
      continue;
    bool seen = false;
    for (auto& [q, qprov] : cs)
      if (q == p) {
        seen = true;
        break;
      }
    if (!seen) cs.push_back({p, prov});
  }
  std::sort(cs.begin(), cs.end(), [&](const auto& a, const auto& b) {
    return sym.preds[a.first].name < sym.preds[b.first].name;
  });
  for (auto [p, prov] : cs) {
    pool.candidates.push_back(p);
    pool.from_proposer.push_back(prov);
  }
  return pool;
}

struct SelectionOptions {
  double mu = 1.0;      // predicate prior, nats per selected candidate
  double lambda = 0.5;  // description length per condition atom, as in
                        // structure selection
  int sweeps = 8;       // mean-field sweeps per likelihood evaluation
  int h_pmf = 100;
  StructureOptions structure;  // for the one-shot cache build
};

// Everything fitted once over the full pool and then reused for every subset.
struct PredicateCache {
  ProcessModel model;  // given endogenous plus learned exogenous processes
  LearnResult learn;
  std::vector<PredId> dynamic;  // grounding treats these as dynamic
  double full_score = 0;        // score of the all-candidates subset
};

namespace preddetail {

inline std::vector<PredId> schema_preds(const ProcessSchema& s) {
  std::set<PredId> ps;
  for (const LiftedAtom& a : s.cond_start) ps.insert(a.pred);
  for (const LiftedAtom& a : s.cond_overall) ps.insert(a.pred);
  for (const LiftedAtom& a : s.add_eff) ps.insert(a.pred);
  for (const LiftedAtom& a : s.del_eff) ps.insert(a.pred);
  return {ps.begin(), ps.end()};
}

}  // namespace preddetail

// Score one subset of candidates (chosen is parallel to pool.candidates):
// mean-field likelihood of the data under the cached parameters with
// partially covered processes dropped, minus the description length of the
// surviving processes, minus mu per chosen candidate.
inline double score_subset(const Symbols& sym, const TaskUniverse& uni,
                           const std::vector<Trajectory>& trajs,
                           const PredicateCache& cache,
                           const CandidatePool& pool,
                           const std::vector<bool>& chosen,
                           const SelectionOptions& opt = {}) {
  std::set<PredId> dropped;
  for (size_t i = 0; i < pool.candidates.size(); ++i)
    if (!chosen[i]) dropped.insert(pool.candidates[i]);

  ProcessModel m;
  m.frame = cache.model.frame;
  LearnableParams lp;
  lp.WF = cache.model.frame.log_strength;
  double dl = 0;
  for (const ProcessSchema& s : cache.model.schemas) {
    bool usable = true;
    for (PredId p : preddetail::schema_preds(s))
      if (dropped.count(p)) {
        usable = false;
        break;
      }
    if (!usable) continue;
    dl += opt.lambda * (double)(s.cond_start.size() + s.cond_overall.size());
    SchemaParams sp;
    sp.W = s.log_strength;
    sp.delay = s.delay;
    lp.schema.push_back(sp);
    m.schemas.push_back(s);
  }

  std::vector<LikelihoodInstance> insts;
  for (const Trajectory& tr : trajs) {
    if (tr.states.size() < 2) continue;
    Grounding g = ground_all(sym, uni, m, tr.states[0], cache.dynamic);
    insts.push_back(build_instance(sym, uni, tr, m, g));
  }
  double ll = insts.empty()
                  ? 0.0
                  : elbo_sweeps(insts, lp, opt.sweeps, opt.h_pmf);

  int n_chosen = 0;
  for (size_t i = 0; i < chosen.size(); ++i)
    if (chosen[i]) ++n_chosen;
  return ll - dl - opt.mu * (double)n_chosen;
}

// One structure-learning pass with the whole pool visible.
inline PredicateCache build_cache(const Symbols& sym, const TaskUniverse& uni,
                                  const std::vector<Trajectory>& trajs,
                                  const ProcessModel& endo,
                                  const CandidatePool& pool,
                                  const SelectionOptions& opt = {}) {
  PredicateCache cache;
  cache.learn = learn_structure(sym, uni, trajs, endo, opt.structure);
  cache.model = cache.learn.model;
  cache.dynamic = observed_dynamic_preds(uni, trajs);
  for (PredId p : opt.structure.derived_preds) cache.dynamic.push_back(p);
  std::sort(cache.dynamic.begin(), cache.dynamic.end());
  cache.dynamic.erase(
      std::unique(cache.dynamic.begin(), cache.dynamic.end()),
      cache.dynamic.end());
  cache.full_score =
      score_subset(sym, uni, trajs, cache, pool,
                   std::vector<bool>(pool.candidates.size(), true), opt);
  return cache;
}

struct SelectionRound {
  std::string added;  // candidate accepted this round
  double score = 0;
};

struct SelectionResult {
  std::vector<bool> chosen;        // over pool.candidates
  std::vector<PredId> selected;    // in acceptance order
  double empty_score = 0;
  double final_score = 0;
  std::vector<SelectionRound> rounds;
};

// Greedy forward selection: start from no candidates, each round add the
// strict best improvement, stop when nothing improves. Equal improvements
// break toward the alphabetically first candidate (the pool is name-sorted,
// so scanning order settles it).
inline SelectionResult greedy_select(const Symbols& sym,
                                     const TaskUniverse& uni,
                                     const std::vector<Trajectory>& trajs,
                                     const PredicateCache& cache,
                                     const CandidatePool& pool,
                                     const SelectionOptions& opt = {}) {
  SelectionResult res;
  res.chosen.assign(pool.candidates.size(), false);
  res.empty_score =
      score_subset(sym, uni, trajs, cache, pool, res.chosen, opt);
  double current = res.empty_score;
  for (;;) {
    int best_i = -1;
    double best_score = current;
    for (size_t i = 0; i < pool.candidates.size(); ++i) {
      if (res.chosen[i]) continue;
      std::vector<bool> trial = res.chosen;
      trial[i] = true;
      double s = score_subset(sym, uni, trajs, cache, pool, trial, opt);
      if (s > best_score) {
        best_score = s;
        best_i = (int)i;
      }
    }
    if (best_i < 0) break;
    res.chosen[best_i] = true;
    res.selected.push_back(pool.candidates[best_i]);
    current = best_score;
    res.rounds.push_back(
        {sym.preds[pool.candidates[best_i]].name, best_score});
  }
  res.final_score = current;
  return res;
}

}  // namespace exo

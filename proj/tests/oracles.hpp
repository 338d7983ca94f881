#pragma once

// Reference implementations used only by tests. Kept deliberately simple and
// independent of the library's algorithms so they can serve as oracles.

#include <functional>
#include <set>
#include <vector>

#include "exo/process.hpp"

namespace oracle {

// Central finite difference of a scalar function along one coordinate.
inline double central_diff(const std::function<double(double)>& f, double x,
                           double eps = 1e-5) {
  return (f(x + eps) - f(x - eps)) / (2 * eps);
}

// Delete-free reachability by naive saturation: repeatedly apply any process
// whose start+overall conditions are contained in the reached set, adding its
// add effects, until no growth. Derived rules are applied by the caller via
// the `derive` hook (monotone: may only add atoms).
inline bool relaxed_reachable(
    const std::vector<exo::GroundProcess>& procs,
    const exo::AbstractState& init, const std::vector<exo::AtomId>& goal,
    int universe_size,
    const std::function<void(exo::AbstractState&)>& derive = {}) {
  exo::AbstractState reached = init;
  if (derive) derive(reached);
  bool grew = true;
  while (grew) {
    grew = false;
    for (const exo::GroundProcess& p : procs) {
      if (!exo::cond_holds(p.cond_start, reached)) continue;
      if (!exo::cond_holds(p.cond_overall, reached)) continue;
      for (exo::AtomId a : p.add_eff)
        if (!reached.test(a)) {
          reached.set(a);
          grew = true;
        }
    }
    if (grew && derive) derive(reached);
  }
  (void)universe_size;
  for (exo::AtomId g : goal)
    if (!reached.test(g)) return false;
  return true;
}

}  // namespace oracle

#pragma once

// Probabilistic semantics of a process model over an observed state sequence.
//
// An instance is a sequence of bit states s_0..s_T plus a set of triggers:
// (process, t) pairs saying the process was set off at time t. Each trigger
// owns a latent arrival time t + d with delay prior p(d). Given arrivals, the
// per-step likelihood factorizes over atoms: an arriving process pushes its
// add effects toward 1 and delete effects toward 0 with weight W, a frame
// axiom pushes every atom toward its previous value with weight WF, and each
// atom's factor is normalized over {0, 1}. An arrival whose overall
// conditions broke between trigger and arrival executes nothing (its delay
// mass still counts).
//
// exact_log_marginal sums over every combination of arrivals (exponential;
// guarded). elbo lower-bounds it with an independent posterior q over each
// trigger's arrival, collapsing all delays that land beyond T into one NONE
// option. The bound replaces each atom's E_q[log Z] with log E_q[Z], which
// factorizes into per-trigger terms (Jensen in the right direction).
//
// fit_params runs Adam jointly over process weights, frame weight, delay
// parameters (std via softplus), and all posterior logits.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "exo/delay.hpp"
#include "exo/symbols.hpp"

namespace exo {

struct LikelihoodProcess {
  std::vector<int> cond_overall;  // atom indices in [0, J)
  std::vector<int> add_eff;
  std::vector<int> del_eff;
  int schema = 0;  // parameter-tying index into LearnableParams::schema
};

struct Trigger {
  int process = 0;  // index into LikelihoodInstance::procs
  int t = 0;        // 0 <= t < T
};

struct LikelihoodInstance {
  int J = 0;
  std::vector<AbstractState> states;  // s_0..s_T over J atoms
  std::vector<LikelihoodProcess> procs;
  std::vector<Trigger> triggers;

  int horizon() const { return (int)states.size() - 1; }
};

struct SchemaParams {
  double W = 1.0;
  DelayDistribution delay = DelayDistribution::constant(1.0);
  bool fit_W = true;
  bool fit_delay = true;
};

struct LearnableParams {
  std::vector<SchemaParams> schema;
  double WF = 1.0;
  bool fit_WF = true;
};

// Posterior over one trigger's arrival: softmax over the listed absolute
// arrival times plus, when the prior leaves mass beyond T, a NONE option.
// The support is frozen when the posterior is created.
struct ArrivalPosterior {
  std::vector<int> arrivals;
  bool has_none = false;
  std::vector<double> logits;  // arrivals.size() + has_none entries

  int options() const { return (int)arrivals.size() + (has_none ? 1 : 0); }
};

namespace lik {

constexpr double kMassFloor = 1e-300;

inline double softplus(double x) {
  return x > 30 ? x : std::log1p(std::exp(x));
}
inline double softplus_inv(double y) {
  return y > 30 ? y : std::log(std::expm1(y));
}
inline double sigmoid(double x) {
  return x >= 0 ? 1.0 / (1.0 + std::exp(-x)) : std::exp(x) / (1.0 + std::exp(x));
}

// ok(a): overall conditions hold on s_{t_r+1} .. s_{a-1}
inline bool ok_run(const LikelihoodInstance& inst, const LikelihoodProcess& p,
                   int t_r, int a) {
  for (int u = t_r + 1; u < a; ++u)
    for (int j : p.cond_overall)
      if (!inst.states[u].test(j)) return false;
  return true;
}

}  // namespace lik

inline std::vector<ArrivalPosterior> init_posteriors(
    const LikelihoodInstance& inst, const LearnableParams& params, int h_pmf) {
  int T = inst.horizon();
  std::vector<ArrivalPosterior> rows;
  rows.reserve(inst.triggers.size());
  for (const Trigger& tr : inst.triggers) {
    const SchemaParams& sp = params.schema[inst.procs[tr.process].schema];
    std::vector<double> pmf = delay_pmf(sp.delay, h_pmf);
    ArrivalPosterior row;
    double none = 0.0;
    for (int d = 1; d <= h_pmf; ++d) {
      if (!(pmf[d - 1] > 0.0)) continue;
      if (tr.t + d <= T)
        row.arrivals.push_back(tr.t + d);
      else
        none += pmf[d - 1];
    }
    row.has_none = none > 0.0;
    row.logits.assign(row.options(), 0.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// exact marginal

inline double exact_branch_count(const LikelihoodInstance& inst,
                                 const LearnableParams& params, int h_pmf) {
  int T = inst.horizon();
  double total = 1.0;
  for (const Trigger& tr : inst.triggers) {
    const SchemaParams& sp = params.schema[inst.procs[tr.process].schema];
    std::vector<double> pmf = delay_pmf(sp.delay, h_pmf);
    int n = 0;
    double none = 0.0;
    for (int d = 1; d <= h_pmf; ++d) {
      if (!(pmf[d - 1] > 0.0)) continue;
      if (tr.t + d <= T)
        ++n;
      else
        none += pmf[d - 1];
    }
    if (none > 0.0) ++n;
    if (n > 0) total *= n;
  }
  return total;
}

inline double exact_log_marginal(const LikelihoodInstance& inst,
                                 const LearnableParams& params, int h_pmf,
                                 double max_branches = 1e6) {
  if (exact_branch_count(inst, params, h_pmf) > max_branches)
    throw std::runtime_error("exact_log_marginal: too many arrival branches");
  int T = inst.horizon();
  int J = inst.J;
  int R = (int)inst.triggers.size();

  // per trigger: options as (log mass, arrival; -1 = none), ok precomputed
  struct Opt {
    double log_mass;
    int arrival;  // -1 for none
    bool ok;
  };
  std::vector<std::vector<Opt>> branches(R);
  for (int r = 0; r < R; ++r) {
    const Trigger& tr = inst.triggers[r];
    const LikelihoodProcess& proc = inst.procs[tr.process];
    const SchemaParams& sp = params.schema[proc.schema];
    std::vector<double> pmf = delay_pmf(sp.delay, h_pmf);
    double none = 0.0;
    for (int d = 1; d <= h_pmf; ++d) {
      if (!(pmf[d - 1] > 0.0)) continue;
      int a = tr.t + d;
      if (a <= T)
        branches[r].push_back(
            {std::log(pmf[d - 1]), a, lik::ok_run(inst, proc, tr.t, a)});
      else
        none += pmf[d - 1];
    }
    if (none > 0.0) branches[r].push_back({std::log(none), -1, false});
  }

  std::vector<int> idx(R, 0);
  std::vector<double> terms;
  bool more = true;
  for (int r = 0; r < R; ++r)
    if (branches[r].empty()) idx[r] = -1;  // dead trigger, no choice
  while (more) {
    double lp = 0.0;
    std::vector<std::vector<int>> active(T + 1);
    for (int r = 0; r < R; ++r) {
      if (idx[r] < 0) continue;
      const Opt& o = branches[r][idx[r]];
      lp += o.log_mass;
      if (o.arrival >= 0 && o.ok)
        active[o.arrival].push_back(inst.triggers[r].process);
    }
    double ll = 0.0;
    for (int t = 1; t <= T; ++t) {
      for (int j = 0; j < J; ++j) {
        double s = inst.states[t].test(j) ? 1.0 : 0.0;
        double sp = inst.states[t - 1].test(j) ? 1.0 : 0.0;
        double num = params.WF * (s == sp ? 1.0 : 0.0);
        for (int pi : active[t]) {
          const LikelihoodProcess& p = inst.procs[pi];
          const double W = params.schema[p.schema].W;
          for (int a : p.add_eff)
            if (a == j) num += W * s;
          for (int a : p.del_eff)
            if (a == j) num += W * (1.0 - s);
        }
        double Z = 0.0;
        for (double sh : {0.0, 1.0}) {
          double z = std::exp(params.WF * (sh == sp ? 1.0 : 0.0));
          for (int pi : active[t]) {
            const LikelihoodProcess& p = inst.procs[pi];
            const double W = params.schema[p.schema].W;
            for (int a : p.add_eff)
              if (a == j) z *= std::exp(W * sh);
            for (int a : p.del_eff)
              if (a == j) z *= std::exp(W * (1.0 - sh));
          }
          Z += z;
        }
        ll += num - std::log(Z);
      }
    }
    terms.push_back(lp + ll);
    // odometer
    int r = 0;
    for (; r < R; ++r) {
      if (idx[r] < 0) continue;
      if (++idx[r] < (int)branches[r].size()) break;
      idx[r] = 0;
    }
    more = r < R;
  }
  if (terms.empty()) return 0.0;
  double mx = -std::numeric_limits<double>::infinity();
  for (double v : terms) mx = std::max(mx, v);
  double acc = 0.0;
  for (double v : terms) acc += std::exp(v - mx);
  return mx + std::log(acc);
}

// ---------------------------------------------------------------------------
// ELBO and gradients

namespace lik {

// Static (parameter-independent) view of one instance + posterior supports.
struct Prepared {
  const LikelihoodInstance* inst = nullptr;
  std::vector<std::vector<char>> ok;  // row -> per arrival
  // t -> (row, option index) of rows with an ok arrival at t
  std::vector<std::vector<std::pair<int, int>>> active_at;
  std::vector<std::vector<int>> touched;  // t -> sorted atom indices
  long long n_eq_total = 0;
  long long n_cells = 0;
};

inline Prepared prepare(const LikelihoodInstance& inst,
                        const std::vector<ArrivalPosterior>& rows) {
  Prepared pr;
  pr.inst = &inst;
  int T = inst.horizon();
  pr.ok.resize(rows.size());
  pr.active_at.assign(T + 1, {});
  pr.touched.assign(T + 1, {});
  for (size_t r = 0; r < rows.size(); ++r) {
    const Trigger& tr = inst.triggers[r];
    const LikelihoodProcess& proc = inst.procs[tr.process];
    pr.ok[r].resize(rows[r].arrivals.size());
    // the run check is monotone in the arrival, computed incrementally
    bool run_ok = true;
    int checked_to = tr.t;  // states s_{t_r+1}..s_{checked_to} verified
    for (size_t o = 0; o < rows[r].arrivals.size(); ++o) {
      int a = rows[r].arrivals[o];
      while (run_ok && checked_to < a - 1) {
        ++checked_to;
        for (int j : proc.cond_overall)
          if (!inst.states[checked_to].test(j)) {
            run_ok = false;
            break;
          }
      }
      pr.ok[r][o] = run_ok && checked_to >= a - 1;
      if (pr.ok[r][o]) {
        pr.active_at[a].emplace_back((int)r, (int)o);
        for (int j : proc.add_eff) pr.touched[a].push_back(j);
        for (int j : proc.del_eff) pr.touched[a].push_back(j);
      }
    }
  }
  for (int t = 0; t <= T; ++t) {
    std::sort(pr.touched[t].begin(), pr.touched[t].end());
    pr.touched[t].erase(
        std::unique(pr.touched[t].begin(), pr.touched[t].end()),
        pr.touched[t].end());
  }
  for (int t = 1; t <= T; ++t) {
    AbstractState x = inst.states[t];
    for (size_t widx = 0; widx < x.bits.size(); ++widx)
      x.bits[widx] ^= inst.states[t - 1].bits[widx];
    pr.n_eq_total += inst.J - x.count();
  }
  pr.n_cells = (long long)T * inst.J;
  return pr;
}

// Parameter coordinates: schema W / mu / rho (std = softplus(rho)), frame
// weight, then every posterior logit in row-major order across instances.
struct Packing {
  std::vector<int> w_index, mu_index, rho_index;  // per schema, -1 if fixed
  int wf_index = -1;
  std::vector<std::vector<std::vector<int>>> logit_index;  // inst, row, opt
  bool has_logits = true;
  int size = 0;
};

// include_logits = false leaves the posteriors out of the packed vector;
// the fitter then updates them by mean-field sweeps instead of gradients.
inline Packing make_packing(
    const LearnableParams& params,
    const std::vector<std::vector<ArrivalPosterior>>& posts,
    bool include_logits = true) {
  Packing pk;
  pk.has_logits = include_logits;
  int n = (int)params.schema.size();
  pk.w_index.assign(n, -1);
  pk.mu_index.assign(n, -1);
  pk.rho_index.assign(n, -1);
  for (int k = 0; k < n; ++k) {
    if (params.schema[k].fit_W) pk.w_index[k] = pk.size++;
    if (params.schema[k].fit_delay &&
        params.schema[k].delay.kind == DelayDistribution::kDiscreteGaussian) {
      pk.mu_index[k] = pk.size++;
      pk.rho_index[k] = pk.size++;
    }
  }
  if (params.fit_WF) pk.wf_index = pk.size++;
  pk.logit_index.resize(posts.size());
  if (pk.has_logits) {
    for (size_t i = 0; i < posts.size(); ++i) {
      pk.logit_index[i].resize(posts[i].size());
      for (size_t r = 0; r < posts[i].size(); ++r) {
        pk.logit_index[i][r].resize(posts[i][r].options());
        for (int o = 0; o < posts[i][r].options(); ++o)
          pk.logit_index[i][r][o] = pk.size++;
      }
    }
  }
  return pk;
}

inline std::vector<double> pack(
    const LearnableParams& params,
    const std::vector<std::vector<ArrivalPosterior>>& posts,
    const Packing& pk) {
  std::vector<double> x(pk.size, 0.0);
  for (size_t k = 0; k < params.schema.size(); ++k) {
    if (pk.w_index[k] >= 0) x[pk.w_index[k]] = params.schema[k].W;
    if (pk.mu_index[k] >= 0) {
      x[pk.mu_index[k]] = params.schema[k].delay.mean;
      x[pk.rho_index[k]] =
          softplus_inv(std::max(params.schema[k].delay.std, 1e-4));
    }
  }
  if (pk.wf_index >= 0) x[pk.wf_index] = params.WF;
  if (pk.has_logits)
    for (size_t i = 0; i < posts.size(); ++i)
      for (size_t r = 0; r < posts[i].size(); ++r)
        for (int o = 0; o < posts[i][r].options(); ++o)
          x[pk.logit_index[i][r][o]] = posts[i][r].logits[o];
  return x;
}

inline void unpack(const std::vector<double>& x, const Packing& pk,
                   LearnableParams& params,
                   std::vector<std::vector<ArrivalPosterior>>& posts) {
  for (size_t k = 0; k < params.schema.size(); ++k) {
    if (pk.w_index[k] >= 0) params.schema[k].W = x[pk.w_index[k]];
    if (pk.mu_index[k] >= 0) {
      params.schema[k].delay.mean = x[pk.mu_index[k]];
      params.schema[k].delay.std = softplus(x[pk.rho_index[k]]);
    }
  }
  if (pk.wf_index >= 0) params.WF = x[pk.wf_index];
  if (pk.has_logits)
    for (size_t i = 0; i < posts.size(); ++i)
      for (size_t r = 0; r < posts[i].size(); ++r)
        for (int o = 0; o < posts[i][r].options(); ++o)
          posts[i][r].logits[o] = x[pk.logit_index[i][r][o]];
}

// Per-schema quantities reused across rows and cells in one evaluation.
struct SchemaEval {
  std::vector<double> pmf;
  std::vector<double> dpmf_dmu;   // d pmf(d) / d mu
  std::vector<double> dpmf_dsig;  // d pmf(d) / d sigma
  double eW = 1.0;
};

inline SchemaEval eval_schema(const SchemaParams& sp, int h_pmf,
                              bool want_grad) {
  SchemaEval se;
  se.eW = std::exp(sp.W);
  se.pmf = delay_pmf(sp.delay, h_pmf);
  if (want_grad && sp.delay.kind == DelayDistribution::kDiscreteGaussian) {
    double mu = sp.delay.mean;
    double sig = std::max(sp.delay.std, 1e-6);
    double m1 = 0.0, m2 = 0.0;
    for (int d = 1; d <= h_pmf; ++d) {
      m1 += se.pmf[d - 1] * (d - mu) / (sig * sig);
      m2 += se.pmf[d - 1] * (d - mu) * (d - mu) / (sig * sig * sig);
    }
    se.dpmf_dmu.resize(h_pmf);
    se.dpmf_dsig.resize(h_pmf);
    for (int d = 1; d <= h_pmf; ++d) {
      se.dpmf_dmu[d - 1] = se.pmf[d - 1] * ((d - mu) / (sig * sig) - m1);
      se.dpmf_dsig[d - 1] =
          se.pmf[d - 1] * ((d - mu) * (d - mu) / (sig * sig * sig) - m2);
    }
  }
  return se;
}

// E for one process effect on atom j at hypothesized value sh, and its W
// derivative. polarity: +1 add, -1 del, 0 untouched.
inline int polarity(const LikelihoodProcess& p, int j) {
  for (int a : p.add_eff)
    if (a == j) return 1;
  for (int a : p.del_eff)
    if (a == j) return -1;
  return 0;
}

// One instance's ELBO. grad, when non-null, is accumulated via the packing.
// benefit, when non-null, receives per-row per-option mean-field scores
// (prior log-mass plus summed cell responsibilities); setting a row's logits
// to its benefit vector is one exact coordinate-ascent sweep on that posterior.
inline double eval_instance(const Prepared& pr, const LearnableParams& params,
                            const std::vector<ArrivalPosterior>& rows,
                            const std::vector<SchemaEval>& schemas, int h_pmf,
                            const Packing* pk, int inst_idx,
                            std::vector<double>* grad,
                            std::vector<std::vector<double>>* benefit = nullptr) {
  const LikelihoodInstance& inst = *pr.inst;
  int T = inst.horizon();
  double val = 0.0;
  if (benefit) benefit->assign(rows.size(), {});

  // softmax posteriors and per-option likelihood-gradient accumulators
  std::vector<std::vector<double>> q(rows.size());
  std::vector<std::vector<double>> gq(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) {
    const ArrivalPosterior& row = rows[r];
    q[r].resize(row.options());
    if (row.options() == 0) continue;
    double mx = -std::numeric_limits<double>::infinity();
    for (double l : row.logits) mx = std::max(mx, l);
    double Z = 0.0;
    for (int o = 0; o < row.options(); ++o) {
      q[r][o] = std::exp(row.logits[o] - mx);
      Z += q[r][o];
    }
    for (int o = 0; o < row.options(); ++o) q[r][o] /= Z;
    if (grad) gq[r].assign(row.options(), 0.0);
    if (benefit) (*benefit)[r].assign(row.options(), 0.0);
  }

  // delay prior + entropy terms per row
  for (size_t r = 0; r < rows.size(); ++r) {
    const ArrivalPosterior& row = rows[r];
    if (row.options() == 0) continue;
    const Trigger& tr = inst.triggers[r];
    int k = inst.procs[tr.process].schema;
    const SchemaEval& se = schemas[k];
    auto mass_of = [&](int o, double* dmu, double* dsig) {
      if (row.has_none && o == (int)row.arrivals.size()) {
        double m = 0.0;
        if (dmu) *dmu = 0.0;
        if (dsig) *dsig = 0.0;
        for (int d = 1; d <= h_pmf; ++d) {
          if (tr.t + d <= T) continue;
          m += se.pmf[d - 1];
          if (dmu) *dmu += se.dpmf_dmu[d - 1];
          if (dsig) *dsig += se.dpmf_dsig[d - 1];
        }
        return m;
      }
      int d = row.arrivals[o] - tr.t;
      if (dmu) *dmu = se.dpmf_dmu[d - 1];
      if (dsig) *dsig = se.dpmf_dsig[d - 1];
      return se.pmf[d - 1];
    };
    bool want_mu = grad && pk && pk->mu_index[k] >= 0;
    for (int o = 0; o < row.options(); ++o) {
      double dmu = 0.0, dsig = 0.0;
      double m = mass_of(o, want_mu ? &dmu : nullptr, want_mu ? &dsig : nullptr);
      double logm = std::log(m + kMassFloor);
      val += q[r][o] * (logm - std::log(q[r][o]));
      if (benefit) (*benefit)[r][o] += logm;
      if (grad) {
        gq[r][o] += logm - std::log(q[r][o]) - 1.0;
        if (want_mu) {
          (*grad)[pk->mu_index[k]] += q[r][o] * dmu / (m + kMassFloor);
          // rho chain applied by the caller after sigma grads accumulate
          (*grad)[pk->rho_index[k]] += q[r][o] * dsig / (m + kMassFloor);
        }
      }
    }
  }

  // likelihood cells
  double eWF = std::exp(params.WF);
  long long explicit_cells = 0, explicit_eq = 0;
  for (int t = 1; t <= T; ++t) {
    const auto& active = pr.active_at[t];
    if (active.empty()) continue;
    for (int j : pr.touched[t]) {
      double s = inst.states[t].test(j) ? 1.0 : 0.0;
      double sprev = inst.states[t - 1].test(j) ? 1.0 : 0.0;
      bool eq = s == sprev;
      ++explicit_cells;
      if (eq) ++explicit_eq;

      // rows whose process touches this atom
      double num = params.WF * (eq ? 1.0 : 0.0);
      struct Part {
        int r, o, pol, k;
        double qv, E0, E1;  // E at sh=0 and sh=1
      };
      std::vector<Part> parts;
      for (auto [r, o] : active) {
        const LikelihoodProcess& proc = inst.procs[inst.triggers[r].process];
        int pol = polarity(proc, j);
        if (pol == 0) continue;
        int k = proc.schema;
        double eW = schemas[k].eW;
        Part p{(int)r, o, pol, k, q[r][o], 1.0, 1.0};
        if (pol > 0)
          p.E1 = eW;  // add: E = exp(W * sh)
        else
          p.E0 = eW;  // del: E = exp(W * (1 - sh))
        parts.push_back(p);
        double logE_s = (pol > 0 ? params.schema[k].W * s
                                 : params.schema[k].W * (1.0 - s));
        num += p.qv * logE_s;
      }
      double A0 = sprev == 0.0 ? eWF : 1.0;
      double A1 = sprev == 1.0 ? eWF : 1.0;
      double P0 = 1.0, P1 = 1.0;
      for (const Part& p : parts) {
        P0 *= 1.0 + p.qv * (p.E0 - 1.0);
        P1 *= 1.0 + p.qv * (p.E1 - 1.0);
      }
      double Z = A0 * P0 + A1 * P1;
      val += num - std::log(Z);
      if (grad && pk->wf_index >= 0) {
        double dZ_dWF = (sprev == 0.0 ? A0 * P0 : 0.0) +
                        (sprev == 1.0 ? A1 * P1 : 0.0);
        (*grad)[pk->wf_index] += (eq ? 1.0 : 0.0) - dZ_dWF / Z;
      }
      if (grad || benefit) {
        for (const Part& p : parts) {
          double f0 = 1.0 + p.qv * (p.E0 - 1.0);
          double f1 = 1.0 + p.qv * (p.E1 - 1.0);
          double lo0 = A0 * P0 / std::max(f0, kMassFloor);  // leave-one-out
          double lo1 = A1 * P1 / std::max(f1, kMassFloor);
          // posterior responsibility
          double logE_s = (p.pol > 0 ? params.schema[p.k].W * s
                                     : params.schema[p.k].W * (1.0 - s));
          double resp = logE_s - (lo0 * (p.E0 - 1.0) + lo1 * (p.E1 - 1.0)) / Z;
          if (grad) gq[p.r][p.o] += resp;
          if (benefit) (*benefit)[p.r][p.o] += resp;
          // process weight
          if (grad && pk->w_index[p.k] >= 0) {
            double dlogE_s = (p.pol > 0 ? s : 1.0 - s);
            // dE/dW is E itself on the pushed branch, 0 on the other
            double dE0 = p.pol > 0 ? 0.0 : p.E0;
            double dE1 = p.pol > 0 ? p.E1 : 0.0;
            (*grad)[pk->w_index[p.k]] +=
                p.qv * dlogE_s - p.qv * (lo0 * dE0 + lo1 * dE1) / Z;
          }
        }
      }
    }
  }

  // frame-only cells in bulk
  long long fo_cells = pr.n_cells - explicit_cells;
  long long fo_eq = pr.n_eq_total - explicit_eq;
  val += params.WF * (double)fo_eq - (double)fo_cells * std::log(eWF + 1.0);
  if (grad && pk->wf_index >= 0)
    (*grad)[pk->wf_index] +=
        (double)fo_eq - (double)fo_cells * (eWF / (eWF + 1.0));

  // project posterior gradients through the softmax
  if (grad && pk->has_logits) {
    for (size_t r = 0; r < rows.size(); ++r) {
      int n = rows[r].options();
      if (n == 0) continue;
      double dot = 0.0;
      for (int o = 0; o < n; ++o) dot += q[r][o] * gq[r][o];
      for (int o = 0; o < n; ++o)
        (*grad)[pk->logit_index[inst_idx][r][o]] += q[r][o] * (gq[r][o] - dot);
    }
  }
  return val;
}

}  // namespace lik

// ELBO of one instance under explicit posteriors.
inline double elbo_value(const LikelihoodInstance& inst,
                         const LearnableParams& params,
                         const std::vector<ArrivalPosterior>& rows,
                         int h_pmf) {
  lik::Prepared pr = lik::prepare(inst, rows);
  std::vector<lik::SchemaEval> schemas;
  for (const SchemaParams& sp : params.schema)
    schemas.push_back(lik::eval_schema(sp, h_pmf, false));
  return lik::eval_instance(pr, params, rows, schemas, h_pmf, nullptr, 0,
                            nullptr);
}

// Joint ELBO over instances with gradient in packed coordinates. The rho
// (softplus) chain rule is applied here.
inline double elbo_packed(
    const std::vector<lik::Prepared>& prepared, LearnableParams& params,
    std::vector<std::vector<ArrivalPosterior>>& posts,
    const lik::Packing& pk, const std::vector<double>& x, int h_pmf,
    std::vector<double>* grad,
    std::vector<std::vector<std::vector<double>>>* benefit = nullptr) {
  lik::unpack(x, pk, params, posts);
  if (grad) grad->assign(pk.size, 0.0);
  if (benefit) benefit->resize(prepared.size());
  std::vector<lik::SchemaEval> schemas;
  for (const SchemaParams& sp : params.schema)
    schemas.push_back(lik::eval_schema(sp, h_pmf, grad != nullptr));
  double val = 0.0;
  for (size_t i = 0; i < prepared.size(); ++i)
    val += lik::eval_instance(prepared[i], params, posts[i], schemas, h_pmf,
                              &pk, (int)i, grad,
                              benefit ? &(*benefit)[i] : nullptr);
  if (grad) {
    for (size_t k = 0; k < params.schema.size(); ++k)
      if (pk.rho_index[k] >= 0)
        (*grad)[pk.rho_index[k]] *= lik::sigmoid(x[pk.rho_index[k]]);
  }
  return val;
}

struct FitOptions {
  int iters = 500;
  // floor for process strengths, applied by projection after each step; a
  // process with negative strength is an inhibitor, which the world semantics
  // has no use for, and unconstrained fits exploit that basin on bad
  // candidate structures
  double min_W = 0.0;
  double step = 0.05;
  int h_pmf = 100;
  int max_restarts = 3;
};

struct FitResult {
  double elbo = -std::numeric_limits<double>::infinity();
  int iters_run = 0;
  int restarts = 0;
};

// Variational EM on the joint ELBO: Adam ascent on the continuous parameters
// alternating with exact mean-field sweeps on the arrival posteriors. Joint
// gradient ascent on the logits tends to park posterior mass on arrivals after
// the observed flip (the frame factor pays for the flip once and the event
// then earns a stay bonus forever); the coordinate sweep re-solves each row
// exactly against the current parameters and lands in the basin where events
// explain flips. Returns the best iterate seen.
inline FitResult fit_params(
    const std::vector<LikelihoodInstance>& instances, LearnableParams& params,
    std::vector<std::vector<ArrivalPosterior>>& posts,
    const FitOptions& opt = {}) {
  if (posts.empty()) {
    posts.reserve(instances.size());
    for (const LikelihoodInstance& inst : instances)
      posts.push_back(init_posteriors(inst, params, opt.h_pmf));
  }
  std::vector<lik::Prepared> prepared;
  prepared.reserve(instances.size());
  for (size_t i = 0; i < instances.size(); ++i)
    prepared.push_back(lik::prepare(instances[i], posts[i]));

  lik::Packing pk = lik::make_packing(params, posts, false);
  std::vector<double> x0 = lik::pack(params, posts, pk);

  // the posterior logits live outside the packed vector, so snapshot them for
  // restarts and for restoring the best iterate
  auto snap_logits = [&]() {
    std::vector<std::vector<std::vector<double>>> s(posts.size());
    for (size_t i = 0; i < posts.size(); ++i) {
      s[i].resize(posts[i].size());
      for (size_t r = 0; r < posts[i].size(); ++r) s[i][r] = posts[i][r].logits;
    }
    return s;
  };
  auto set_logits =
      [&](const std::vector<std::vector<std::vector<double>>>& s) {
        for (size_t i = 0; i < posts.size(); ++i)
          for (size_t r = 0; r < posts[i].size(); ++r)
            posts[i][r].logits = s[i][r];
      };
  const auto init_logits = snap_logits();

  FitResult res;
  std::vector<double> best_x = x0;
  auto best_logits = init_logits;
  std::vector<std::vector<std::vector<double>>> benefit;
  double step = opt.step;
  for (int attempt = 0; attempt <= opt.max_restarts; ++attempt) {
    std::vector<double> x = x0;
    set_logits(init_logits);
    std::vector<double> m(pk.size, 0.0), v(pk.size, 0.0), g;
    bool bad = false;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    for (int it = 1; it <= opt.iters; ++it) {
      double val =
          elbo_packed(prepared, params, posts, pk, x, opt.h_pmf, &g, &benefit);
      if (!std::isfinite(val)) {
        bad = true;
        break;
      }
      if (val > res.elbo) {
        res.elbo = val;
        best_x = x;
        best_logits = snap_logits();
      }
      res.iters_run++;
      for (int i = 0; i < pk.size; ++i) {
        if (!std::isfinite(g[i])) {
          bad = true;
          break;
        }
        m[i] = b1 * m[i] + (1 - b1) * g[i];
        v[i] = b2 * v[i] + (1 - b2) * g[i] * g[i];
        double mh = m[i] / (1 - std::pow(b1, it));
        double vh = v[i] / (1 - std::pow(b2, it));
        x[i] += step * mh / (std::sqrt(vh) + eps);  // ascent
      }
      if (bad) break;
      for (size_t k = 0; k < params.schema.size(); ++k)
        if (pk.w_index[k] >= 0)
          x[pk.w_index[k]] = std::max(x[pk.w_index[k]], opt.min_W);
      // E-step: each row's new logits are its mean-field benefits
      for (size_t i = 0; i < posts.size(); ++i)
        for (size_t r = 0; r < posts[i].size(); ++r)
          if (!benefit[i][r].empty()) posts[i][r].logits = benefit[i][r];
    }
    if (!bad) break;
    res.restarts++;
    step *= 0.5;
  }
  // leave params/posts at the best iterate
  set_logits(best_logits);
  double final_val =
      elbo_packed(prepared, params, posts, pk, best_x, opt.h_pmf, nullptr);
  if (final_val > res.elbo) res.elbo = final_val;
  return res;
}

// ELBO at fixed parameters, with posteriors solved by mean-field sweeps from
// the delay-prior initialization. Used to compare model variants without
// re-fitting anything. Returns the best value seen across sweeps.
inline double elbo_sweeps(const std::vector<LikelihoodInstance>& instances,
                          const LearnableParams& params, int sweeps = 8,
                          int h_pmf = 100) {
  LearnableParams p = params;
  std::vector<std::vector<ArrivalPosterior>> posts;
  posts.reserve(instances.size());
  for (const LikelihoodInstance& inst : instances)
    posts.push_back(init_posteriors(inst, p, h_pmf));
  std::vector<lik::Prepared> prepared;
  prepared.reserve(instances.size());
  for (size_t i = 0; i < instances.size(); ++i)
    prepared.push_back(lik::prepare(instances[i], posts[i]));
  lik::Packing pk = lik::make_packing(p, posts, false);
  std::vector<double> x = lik::pack(p, posts, pk);
  std::vector<std::vector<std::vector<double>>> benefit;
  double best = -std::numeric_limits<double>::infinity();
  for (int s = 0; s < sweeps; ++s) {
    double val =
        elbo_packed(prepared, p, posts, pk, x, h_pmf, nullptr, &benefit);
    best = std::max(best, val);
    for (size_t i = 0; i < posts.size(); ++i)
      for (size_t r = 0; r < posts[i].size(); ++r)
        if (!benefit[i][r].empty()) posts[i][r].logits = benefit[i][r];
  }
  double final_val =
      elbo_packed(prepared, p, posts, pk, x, h_pmf, nullptr, nullptr);
  return std::max(best, final_val);
}

}  // namespace exo

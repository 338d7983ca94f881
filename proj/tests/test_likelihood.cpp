#include <cmath>
#include <vector>

#include "doctest.h"
#include "exo/likelihood.hpp"
#include "exo/random.hpp"
#include "oracles.hpp"

using namespace exo;

namespace {

AbstractState bits(int J, std::vector<int> on) {
  AbstractState s(J);
  for (int j : on) s.set(j);
  return s;
}

// Reference values in this file were computed offline with an independent
// implementation of the generative model (enumerating every arrival
// combination by hand) and are asserted to 1e-9 relative.

// One process, three triggers, no cancellation.
LikelihoodInstance instance_a() {
  LikelihoodInstance inst;
  inst.J = 2;
  inst.states = {bits(2, {0}), bits(2, {0}), bits(2, {0, 1}), bits(2, {0, 1})};
  inst.procs = {{{0}, {1}, {}, 0}};
  inst.triggers = {{0, 0}, {0, 1}, {0, 2}};
  return inst;
}
LearnableParams params_a() {
  LearnableParams p;
  p.schema = {{1.3, DelayDistribution::gaussian(1.5, 0.8), true, true}};
  p.WF = 0.9;
  return p;
}

// Two processes where the second deletes the first one's overall condition.
LikelihoodInstance instance_b() {
  LikelihoodInstance inst;
  inst.J = 3;
  inst.states = {bits(3, {0}), bits(3, {0, 1}), bits(3, {1}), bits(3, {1, 2}),
                 bits(3, {1, 2})};
  inst.procs = {{{0}, {1}, {}, 0}, {{1}, {}, {0}, 1}};
  inst.triggers = {{0, 0}, {0, 1}, {1, 1}, {1, 2}, {1, 3}};
  return inst;
}
LearnableParams params_b() {
  LearnableParams p;
  p.schema = {{1.1, DelayDistribution::gaussian(2.0, 1.0), true, true},
              {0.7, DelayDistribution::gaussian(1.0, 0.5), true, true}};
  p.WF = 1.2;
  return p;
}

// Single trigger with a constant delay: the bound must be tight.
LikelihoodInstance instance_c() {
  LikelihoodInstance inst;
  inst.J = 2;
  inst.states = {bits(2, {0}), bits(2, {0, 1})};
  inst.procs = {{{0}, {1}, {}, 0}};
  inst.triggers = {{0, 0}};
  return inst;
}
LearnableParams params_c() {
  LearnableParams p;
  p.schema = {{2.0, DelayDistribution::constant(1.0), true, true}};
  p.WF = 1.0;
  return p;
}

// Random small instance for bound and gradient checks.
struct RandomProblem {
  LikelihoodInstance inst;
  LearnableParams params;
};

RandomProblem random_problem(RandomSource& rng, int h_pmf) {
  while (true) {
    RandomProblem rp;
    int J = 1 + (int)rng.uniform_int(3);
    int T = 2 + (int)rng.uniform_int(5);
    rp.inst.J = J;
    AbstractState s(J);
    for (int j = 0; j < J; ++j)
      if (rng.uniform() < 0.5) s.set(j);
    rp.inst.states.push_back(s);
    for (int t = 1; t <= T; ++t) {
      for (int j = 0; j < J; ++j)
        if (rng.uniform() < 0.3) s.assign(j, !s.test(j));
      rp.inst.states.push_back(s);
    }
    int n_procs = 1 + (int)rng.uniform_int(2);
    for (int p = 0; p < n_procs; ++p) {
      LikelihoodProcess proc;
      proc.schema = p;
      for (int j = 0; j < J; ++j) {
        double u = rng.uniform();
        if (u < 0.3)
          proc.cond_overall.push_back(j);
      }
      for (int j = 0; j < J; ++j) {
        double u = rng.uniform();
        if (u < 0.35)
          proc.add_eff.push_back(j);
        else if (u < 0.5)
          proc.del_eff.push_back(j);
      }
      rp.inst.procs.push_back(proc);
      SchemaParams sp;
      sp.W = -0.5 + 3.0 * rng.uniform();
      if (rng.uniform() < 0.3)
        sp.delay = DelayDistribution::constant(1.0 + rng.uniform_int(4));
      else
        sp.delay = DelayDistribution::gaussian(0.5 + 3.0 * rng.uniform(),
                                               0.3 + 1.2 * rng.uniform());
      rp.params.schema.push_back(sp);
    }
    rp.params.WF = 0.3 + 1.7 * rng.uniform();
    for (int p = 0; p < n_procs; ++p)
      for (int t = 0; t < T; ++t)
        if (rng.uniform() < 0.3) rp.inst.triggers.push_back({p, t});
    if (rp.inst.triggers.empty())
      rp.inst.triggers.push_back({0, (int)rng.uniform_int(T)});
    if (exact_branch_count(rp.inst, rp.params, h_pmf) <= 2e5) return rp;
  }
}

}  // namespace

TEST_CASE("exact marginal matches the hand-computed references") {
  CHECK(exact_log_marginal(instance_a(), params_a(), 10) ==
        doctest::Approx(-2.274888761934).epsilon(1e-9));
  CHECK(exact_log_marginal(instance_b(), params_b(), 10) ==
        doctest::Approx(-5.750155020951).epsilon(1e-9));
  CHECK(exact_log_marginal(instance_c(), params_c(), 10) ==
        doctest::Approx(-0.626523375036).epsilon(1e-9));
}

TEST_CASE("elbo under uniform posteriors matches the references") {
  {
    LikelihoodInstance inst = instance_a();
    LearnableParams p = params_a();
    auto rows = init_posteriors(inst, p, 10);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].arrivals.size() == 3);  // arrivals 1..3 plus none
    CHECK(rows[0].has_none);
    CHECK(elbo_value(inst, p, rows, 10) ==
          doctest::Approx(-4.328876952028).epsilon(1e-9));
  }
  {
    LikelihoodInstance inst = instance_b();
    LearnableParams p = params_b();
    auto rows = init_posteriors(inst, p, 10);
    CHECK(elbo_value(inst, p, rows, 10) ==
          doctest::Approx(-16.138375806688).epsilon(1e-9));
  }
}

TEST_CASE("single arrival with a point posterior makes the bound tight") {
  LikelihoodInstance inst = instance_c();
  LearnableParams p = params_c();
  auto rows = init_posteriors(inst, p, 10);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].arrivals == std::vector<int>{1});
  CHECK_FALSE(rows[0].has_none);  // constant delay lands inside the window
  double e = elbo_value(inst, p, rows, 10);
  CHECK(e == doctest::Approx(-0.626523375036).epsilon(1e-9));
  CHECK(e == doctest::Approx(exact_log_marginal(inst, p, 10)).epsilon(1e-12));
}

TEST_CASE("a trigger whose delay cannot land contributes nothing") {
  // constant delay 5 issued at T-1: the only option is NONE with mass one
  LikelihoodInstance inst = instance_c();
  inst.triggers = {{0, 0}};
  LearnableParams p = params_c();
  p.schema[0].delay = DelayDistribution::constant(5.0);
  auto rows = init_posteriors(inst, p, 10);
  REQUIRE(rows[0].arrivals.empty());
  CHECK(rows[0].has_none);
  CHECK(elbo_value(inst, p, rows, 10) ==
        doctest::Approx(exact_log_marginal(inst, p, 10)).epsilon(1e-12));
}

TEST_CASE("elbo lower-bounds the exact marginal for any posterior") {
  RandomSource rng(314);
  for (int trial = 0; trial < 40; ++trial) {
    RandomProblem rp = random_problem(rng, 12);
    double exact = exact_log_marginal(rp.inst, rp.params, 12, 2e5 + 1);
    REQUIRE(std::isfinite(exact));
    auto rows = init_posteriors(rp.inst, rp.params, 12);
    CHECK(elbo_value(rp.inst, rp.params, rows, 12) <= exact + 1e-7);
    for (int rep = 0; rep < 3; ++rep) {
      for (auto& row : rows)
        for (double& l : row.logits) l = 1.5 * rng.normal();
      CHECK(elbo_value(rp.inst, rp.params, rows, 12) <= exact + 1e-7);
    }
  }
}

TEST_CASE("analytic gradients match central differences") {
  RandomSource rng(2718);
  int coords_checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    RandomProblem rp = random_problem(rng, 12);
    std::vector<LikelihoodInstance> insts = {rp.inst};
    std::vector<std::vector<ArrivalPosterior>> posts = {
        init_posteriors(rp.inst, rp.params, 12)};
    for (auto& row : posts[0])
      for (double& l : row.logits) l = rng.normal();
    std::vector<lik::Prepared> prepared = {lik::prepare(rp.inst, posts[0])};
    lik::Packing pk = lik::make_packing(rp.params, posts);
    std::vector<double> x = lik::pack(rp.params, posts, pk);
    std::vector<double> g;
    LearnableParams work = rp.params;
    elbo_packed(prepared, work, posts, pk, x, 12, &g);
    for (int i = 0; i < pk.size; ++i) {
      auto f = [&](double xi) {
        std::vector<double> x2 = x;
        x2[i] = xi;
        return elbo_packed(prepared, work, posts, pk, x2, 12, nullptr);
      };
      double numeric = oracle::central_diff(f, x[i]);
      double tol = 1e-4 * std::max({1.0, std::fabs(g[i]), std::fabs(numeric)});
      CHECK(std::fabs(g[i] - numeric) <= tol);
      ++coords_checked;
    }
  }
  CHECK(coords_checked > 90);
}

TEST_CASE("fitting recovers a planted delay distribution") {
  // one process adds atom 1 after a DG(3,1) delay; thirty trajectories
  RandomSource rng(99);
  DelayDistribution truth = DelayDistribution::gaussian(3.0, 1.0);
  std::vector<LikelihoodInstance> insts;
  for (int n = 0; n < 30; ++n) {
    int T = 10;
    int d = sample_delay(truth, 15, rng);
    LikelihoodInstance inst;
    inst.J = 2;
    for (int t = 0; t <= T; ++t)
      inst.states.push_back(bits(2, t >= d ? std::vector<int>{0, 1}
                                           : std::vector<int>{0}));
    inst.procs = {{{0}, {1}, {}, 0}};
    inst.triggers = {{0, 0}};
    insts.push_back(std::move(inst));
  }
  LearnableParams params;
  params.schema = {{1.0, DelayDistribution::gaussian(5.0, 2.0), true, true}};
  params.WF = 1.0;
  std::vector<std::vector<ArrivalPosterior>> posts;
  FitOptions opt;
  opt.iters = 1500;  // deterministic flips drive W upward slowly
  opt.h_pmf = 15;
  FitResult res = fit_params(insts, params, posts, opt);
  CHECK(std::isfinite(res.elbo));
  CHECK(res.iters_run >= 1500);
  CHECK(params.schema[0].W > 1.0);  // effects clearly present
  CHECK(params.schema[0].delay.mean > 2.5);
  CHECK(params.schema[0].delay.mean < 3.5);
  CHECK(params.schema[0].delay.std > 0.4);
  CHECK(params.schema[0].delay.std < 1.6);
}

TEST_CASE("fitting never returns worse than the starting point") {
  RandomSource rng(5555);
  for (int trial = 0; trial < 5; ++trial) {
    RandomProblem rp = random_problem(rng, 12);
    std::vector<LikelihoodInstance> insts = {rp.inst};
    std::vector<std::vector<ArrivalPosterior>> posts = {
        init_posteriors(rp.inst, rp.params, 12)};
    double before = elbo_value(rp.inst, rp.params, posts[0], 12);
    LearnableParams params = rp.params;
    FitOptions opt;
    opt.iters = 120;
    opt.h_pmf = 12;
    FitResult res = fit_params(insts, params, posts, opt);
    CHECK(res.elbo >= before - 1e-9);
  }
}

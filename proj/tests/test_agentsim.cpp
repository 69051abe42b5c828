#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "botnet/agentsim.hpp"
#include "botnet/equilibrium.hpp"
#include "botnet/sampling.hpp"

using namespace botnet;

namespace {

ModelParams sim_params() {
  ModelParams p;
  p.q_rec_D = 1.0;
  p.q_rec_U = 0.8;
  p.q_inf_D = 0.2;
  p.q_inf_U = 0.6;
  p.beta_UU = 1.5;
  p.beta_UD = 0.7;
  p.beta_DU = 1.2;
  p.beta_DD = 0.5;
  p.lambda = 1.0;
  p.v_H = 1.0;
  p.k_D = 0.4;
  p.k_I = 1.0;
  return p;
}

}  // namespace

TEST(AgentCounts, LargestRemainder) {
  const AgentCounts c = AgentCounts::from_fractions(StateDist::make(0.25, 0.25, 0.25, 0.25), 10);
  EXPECT_EQ(c.total(), 10);
  EXPECT_EQ(c.n, (std::array<std::int64_t, 4>{3, 3, 2, 2}));
  const AgentCounts d = AgentCounts::from_fractions(StateDist::make(0.123, 0.456, 0.2, 0.221), 1000);
  EXPECT_EQ(d.n, (std::array<std::int64_t, 4>{123, 456, 200, 221}));
  Rng rng(1);
  for (int t = 0; t < 1000; ++t) {
    const std::int64_t N = 1 + t;
    EXPECT_EQ(AgentCounts::from_fractions(sample_state(rng), N).total(), N);
  }
}

TEST(EventRates, AllZeroAtDiseaseFreeWithoutHerder) {
  ModelParams p = sim_params();
  p.v_H = 0.0;
  const AgentCounts c{{0, 0, 0, 50}};
  const EventRates r = event_rates(p, c, control_of(StrategyCase::kUnprotected));
  for (double v : r) EXPECT_EQ(v, 0.0);
}

TEST(EventRates, SingleContactExample) {
  ModelParams p;
  p.beta_UU = 1.0;
  const AgentCounts c{{0, 0, 1, 1}};
  const EventRates r = event_rates(p, c, ControlVector{});
  double total = 0.0;
  int nonzero = 0;
  for (double v : r) {
    total += v;
    nonzero += v != 0.0;
  }
  EXPECT_EQ(nonzero, 1);
  EXPECT_EQ(total, 0.5);
  EXPECT_EQ(r[static_cast<std::size_t>(Event::kContactUU)], 0.5);
}

TEST(EventRates, GeneratorDriftEqualsKineticRhs) {
  Rng rng(2);
  for (int t = 0; t < 10000; ++t) {
    SampleSpec spec;
    spec.lambda = std::array{1.0, 10.0, 1e3}[t % 3];
    const ModelParams p = sample_params(rng, spec);
    AgentCounts c;
    for (auto& n : c.n) n = static_cast<std::int64_t>(rng.uniform() * 500.0);
    if (c.total() == 0) c.n[US] = 1;
    const ControlVector u = ControlVector::from_bits(static_cast<unsigned>(t % 16));
    ASSERT_LE(sup_distance(generator_drift(p, c, u), kinetic_rhs(p, c.fractions(), u).dx), 1e-12);
    for (double v : event_rates(p, c, u)) ASSERT_GE(v, 0.0);
  }
}

TEST(EventRates, ScaledRatesConvergeToFlowTerms) {
  const ModelParams p = sim_params();
  const StateDist x = StateDist::make(0.1, 0.2, 0.3, 0.4);
  const AgentCounts c = AgentCounts::from_fractions(x, 1000000);
  const EventRates r = event_rates(p, c, ControlVector{});
  const auto [alpha, beta] = alpha_beta(p, x);
  const double contacts_D = r[4] + r[5] + r[0];
  EXPECT_NEAR(contacts_D / 1e6, x[DS] * alpha, 1e-12);
  const double contacts_U = r[6] + r[7] + r[1];
  EXPECT_NEAR(contacts_U / 1e6, x[US] * beta, 1e-12);
}

TEST(Simulate, SingleSusceptibleWithoutHerderNeverMoves) {
  ModelParams p = sim_params();
  p.v_H = 0.0;
  SimConfig cfg;
  cfg.n_agents = 1;
  cfg.horizon = 5.0;
  cfg.seed = 9;
  cfg.control = ControlVector{};
  cfg.x0 = StateDist::make(0, 0, 0, 1);
  const SimResult r = simulate(p, cfg);
  EXPECT_EQ(r.events, 0u);
  for (const auto& pt : r.trajectory) EXPECT_EQ(pt.x, StateDist::make(0, 0, 0, 1));
  EXPECT_EQ(compare_ode(r.trajectory, p, cfg.control), 0.0);
}

TEST(Simulate, CountsConservedAndDeterministic) {
  const ModelParams p = sim_params();
  SimConfig cfg;
  cfg.n_agents = 500;
  cfg.horizon = 5.0;
  cfg.seed = 123;
  cfg.sample_interval = 0.05;
  cfg.x0 = StateDist::make(0.25, 0.25, 0.25, 0.25);
  const SimResult a = simulate(p, cfg);
  const SimResult b = simulate(p, cfg);
  ASSERT_EQ(a.trajectory.size(), 101u);
  ASSERT_EQ(a.events, b.events);
  for (std::size_t k = 0; k < a.trajectory.size(); ++k) {
    EXPECT_EQ(a.counts[k], b.counts[k]);
    EXPECT_EQ(a.counts[k].total(), 500);
    EXPECT_EQ(a.trajectory[k].t, b.trajectory[k].t);
  }
  cfg.seed = 124;
  EXPECT_NE(simulate(p, cfg).events, a.events);
}

TEST(Simulate, TimeAverageNearCaseOneFixedPoint) {
  const ModelParams p = sim_params();
  const FixedPoint fp = fixed_point_acyclic(p, StrategyCase::kUnprotected);
  const double min_rate = std::min({p.q_rec_U, p.attack_U(), p.beta_UU, p.lambda});
  SimConfig cfg;
  cfg.n_agents = 2000;
  cfg.horizon = 100.0 / min_rate;
  cfg.seed = 5;
  cfg.sample_interval = 0.5;
  cfg.x0 = fp.x;
  const SimResult r = simulate(p, cfg);
  // Discard the first tenth, then compare the sample mean with x*.
  std::vector<double> v;
  for (const auto& pt : r.trajectory)
    if (pt.t >= 0.1 * cfg.horizon) v.push_back(pt.x[UI]);
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
  double ss = 0.0;
  for (double y : v) ss += (y - mean) * (y - mean);
  const double sd = std::sqrt(ss / (v.size() - 1));
  EXPECT_LE(std::abs(mean - fp.x[UI]), 3.0 * sd);
}

TEST(Simulate, DeviationShrinksWithPopulation) {
  const ModelParams p = sim_params();
  SimConfig cfg;
  cfg.horizon = 3.0;
  cfg.seed = 77;
  cfg.sample_interval = 0.1;
  cfg.x0 = StateDist::make(0.25, 0.25, 0.25, 0.25);
  cfg.n_agents = 100;
  const DeviationStats small = compare_ode_replicas(p, cfg, 20);
  cfg.n_agents = 10000;
  const DeviationStats large = compare_ode_replicas(p, cfg, 20);
  EXPECT_LT(large.mean, small.mean / 4.0);
  // Threading does not change the numbers.
  const DeviationStats serial = compare_ode_replicas(p, cfg, 20, 1);
  EXPECT_EQ(serial.per_replica, large.per_replica);
}

TEST(Myopic, SingleAgentIsDeterministic) {
  const ModelParams p = sim_params();
  SimConfig cfg;
  cfg.n_agents = 1;
  cfg.horizon = 20.0;
  cfg.seed = 3;
  cfg.cadence = Cadence::kPerEvent;
  cfg.x0 = StateDist::make(0, 0, 0, 1);
  const SimResult a = simulate_myopic(p, cfg);
  const SimResult b = simulate_myopic(p, cfg);
  ASSERT_EQ(a.switches.size(), b.switches.size());
  for (std::size_t k = 0; k < a.switches.size(); ++k) {
    EXPECT_EQ(a.switches[k].t, b.switches[k].t);
    EXPECT_EQ(a.switches[k].new_case, b.switches[k].new_case);
  }
  EXPECT_EQ(a.events, b.events);
}

TEST(Myopic, HighFeeSettlesOnCaseOne) {
  ModelParams p = sim_params();
  p.q_rec_D = p.q_rec_U = 1.0;
  p.lambda = 50.0;
  p.k_D = 0.95;  // far above every switching threshold
  SimConfig cfg;
  cfg.n_agents = 1000;
  cfg.horizon = 10.0;
  cfg.seed = 4;
  cfg.x0 = StateDist::make(0.25, 0.25, 0.25, 0.25);
  const SimResult r = simulate_myopic(p, cfg);
  ASSERT_FALSE(r.control.empty());
  for (std::size_t k = r.control.size() / 2; k < r.control.size(); ++k)
    EXPECT_EQ(r.control[k], control_of(StrategyCase::kUnprotected));
}

TEST(Myopic, StaysNearStableEquilibrium) {
  ModelParams p = sim_params();
  p.q_rec_D = p.q_rec_U = 1.0;
  p.lambda = 20.0;
  p.k_D = 0.6;
  const auto eq = solve_mfg(p);
  ASSERT_FALSE(eq.empty());
  SimConfig cfg;
  cfg.n_agents = 5000;
  const double min_rate = std::min({p.q_rec_U, p.attack_D(), p.beta_DD});
  cfg.horizon = 50.0 / min_rate;
  cfg.sample_interval = 0.5;
  cfg.seed = 8;
  cfg.x0 = eq.front().x;
  const SimResult r = simulate_myopic(p, cfg);
  std::size_t near = 0;
  for (const auto& pt : r.trajectory)
    near += sup_distance(pt.x.values(), eq.front().x.values()) <= 0.05;
  EXPECT_GT(static_cast<double>(near) / r.trajectory.size(), 0.9);
}

TEST(SimConfig, Validation) {
  SimConfig cfg;
  cfg.horizon = 0.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.horizon = 1.0;
  cfg.sample_interval = -1.0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
  cfg.sample_interval = 0.1;
  cfg.n_agents = 0;
  EXPECT_THROW(cfg.validate(), InvalidArgument);
}

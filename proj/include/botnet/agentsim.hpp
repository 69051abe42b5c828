#pragma once

// Exact event-driven simulation of the N-agent Markov chain whose kinetic
// limit is kinetic_rhs, under a fixed control or under myopic feedback.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <thread>
#include <vector>

#include "botnet/hjb.hpp"
#include "botnet/model.hpp"
#include "botnet/ode.hpp"

namespace botnet {

struct AgentCounts {
  std::array<std::int64_t, 4> n{0, 0, 0, 0};

  std::int64_t total() const { return n[0] + n[1] + n[2] + n[3]; }
  std::int64_t operator[](std::size_t i) const { return n[i]; }

  StateDist fractions() const {
    const double N = static_cast<double>(total());
    return StateDist::normalized({n[0] / N, n[1] / N, n[2] / N, n[3] / N});
  }

  void validate() const {
    for (auto c : n)
      if (c < 0) throw InvalidArgument("agent counts must be nonnegative");
    if (total() < 1) throw InvalidArgument("need at least one agent");
  }

  // Largest-remainder rounding of N * x; ties go to the lower state index.
  static AgentCounts from_fractions(const StateDist& x, std::int64_t N) {
    if (N < 1) throw InvalidArgument("need at least one agent");
    AgentCounts c;
    std::array<double, 4> rem{};
    std::int64_t assigned = 0;
    for (std::size_t i = 0; i < 4; ++i) {
      const double exact = x[i] * static_cast<double>(N);
      c.n[i] = static_cast<std::int64_t>(std::floor(exact));
      rem[i] = exact - static_cast<double>(c.n[i]);
      assigned += c.n[i];
    }
    std::array<std::size_t, 4> order{0, 1, 2, 3};
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
    for (std::size_t k = 0; assigned < N; k = (k + 1) % 4, ++assigned) ++c.n[order[k]];
    return c;
  }

  bool operator==(const AgentCounts&) const = default;
};

// The twelve jumps of the N-agent generator, each moving one agent.
enum class Event : std::uint8_t {
  kAttackD,    // DS -> DI, n_DS q_inf_D v_H
  kAttackU,    // US -> UI, n_US q_inf_U v_H
  kRecoverD,   // DI -> DS, n_DI q_rec_D
  kRecoverU,   // UI -> US, n_UI q_rec_U
  kContactDD,  // DS -> DI, n_DI n_DS beta_DD / N
  kContactUD,  // DS -> DI, n_UI n_DS beta_UD / N
  kContactDU,  // US -> UI, n_DI n_US beta_DU / N
  kContactUU,  // US -> UI, n_UI n_US beta_UU / N
  kSwitchDI,   // DI -> UI, lambda n_DI u_DI
  kSwitchDS,   // DS -> US, lambda n_DS u_DS
  kSwitchUI,   // UI -> DI, lambda n_UI u_UI
  kSwitchUS,   // US -> DS, lambda n_US u_US
};

inline constexpr std::size_t kEventCount = 12;

struct Jump {
  State from;
  State to;
};

inline constexpr std::array<Jump, kEventCount> kJumps{{
    {DS, DI}, {US, UI}, {DI, DS}, {UI, US}, {DS, DI}, {DS, DI},
    {US, UI}, {US, UI}, {DI, UI}, {DS, US}, {UI, DI}, {US, DS}}};

using EventRates = std::array<double, kEventCount>;

inline EventRates event_rates(const ModelParams& p, const AgentCounts& c, const ControlVector& u) {
  const double N = static_cast<double>(c.total());
  const double di = static_cast<double>(c[DI]);
  const double ds = static_cast<double>(c[DS]);
  const double ui = static_cast<double>(c[UI]);
  const double us = static_cast<double>(c[US]);
  const double lam = p.lambda;
  return {ds * p.attack_D(),
          us * p.attack_U(),
          di * p.q_rec_D,
          ui * p.q_rec_U,
          di * ds * p.beta_DD / N,
          ui * ds * p.beta_UD / N,
          di * us * p.beta_DU / N,
          ui * us * p.beta_UU / N,
          lam * di * u[DI],
          lam * ds * u[DS],
          lam * ui * u[UI],
          lam * us * u[US]};
}

// (1/N) * sum over events of rate * (e_to - e_from): the drift of n/N.
inline Vec4 generator_drift(const ModelParams& p, const AgentCounts& c, const ControlVector& u) {
  const EventRates r = event_rates(p, c, u);
  const double N = static_cast<double>(c.total());
  Vec4 d{};
  for (std::size_t e = 0; e < kEventCount; ++e) {
    d[kJumps[e].to] += r[e];
    d[kJumps[e].from] -= r[e];
  }
  for (double& v : d) v /= N;
  return d;
}

// mt19937_64 with fixed conversions to uniform and exponential variates, so a
// seed reproduces the same stream on every platform and standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

  double exponential(double rate) { return -std::log1p(-uniform()) / rate; }

 private:
  std::mt19937_64 eng_;
};

enum class PolicyKind { kFixed, kMyopic };
enum class Cadence { kPerInterval, kPerEvent };

struct SimConfig {
  std::int64_t n_agents = 1000;
  double horizon = 10.0;
  std::uint64_t seed = 0;
  PolicyKind policy = PolicyKind::kFixed;
  ControlVector control = control_of(StrategyCase::kUnprotected);  // fixed policy, or myopic fallback
  double sample_interval = 0.1;
  Cadence cadence = Cadence::kPerInterval;  // myopic recomputation
  StateDist x0;                             // rounded to counts by largest remainder

  void validate() const {
    if (n_agents < 1) throw InvalidArgument("n_agents must be at least 1");
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw InvalidArgument("horizon must be positive");
    if (!(sample_interval > 0.0) || !std::isfinite(sample_interval))
      throw InvalidArgument("sample_interval must be positive");
  }
};

struct SwitchRecord {
  double t = 0.0;
  std::optional<StrategyCase> old_case;
  StrategyCase new_case = StrategyCase::kUnprotected;
  double mu = 0.0;
};

struct SimResult {
  Trajectory trajectory;              // empirical n/N at the sample times
  std::vector<ControlVector> control;  // control in force at each sample
  std::vector<AgentCounts> counts;
  std::vector<SwitchRecord> switches;       // myopic only
  std::vector<double> no_solution_times;    // myopic: times with no valid HJB solution
  std::uint64_t events = 0;
};

namespace detail {

inline void apply_jump(AgentCounts& c, std::size_t e) {
  --c.n[kJumps[e].from];
  ++c.n[kJumps[e].to];
}

inline std::size_t pick_event(const EventRates& r, double total, double u) {
  const double target = u * total;
  double acc = 0.0;
  std::size_t last = kEventCount;
  for (std::size_t e = 0; e < kEventCount; ++e) {
    if (r[e] <= 0.0) continue;
    acc += r[e];
    last = e;
    if (target < acc) return e;
  }
  return last;  // rounding left target at the top of the range
}

// Myopic choice at the empirical state: the mu-minimal valid HJB solution,
// keeping the incumbent when it ties the minimum.
class MyopicController {
 public:
  MyopicController(const ModelParams& p, SimResult& log) : p_(p), log_(log) {}

  ControlVector update(double t, const StateDist& x, const ControlVector& current) {
    const auto sols = enumerate_hjb(p_, x);
    if (sols.empty()) {
      log_.no_solution_times.push_back(t);
      return current;
    }
    const std::optional<StrategyCase> incumbent = case_of(current);
    const double best = sols.front().mu;
    const double tie = kSlackTolerance * std::max(1.0, std::abs(best));
    for (const HjbSolution& s : sols)
      if (incumbent && s.strategy == *incumbent && s.mu <= best + tie) return current;
    const HjbSolution& chosen = sols.front();
    log_.switches.push_back({t, incumbent, chosen.strategy, chosen.mu});
    return chosen.control();
  }

 private:
  const ModelParams& p_;
  SimResult& log_;
};

}  // namespace detail

// Gillespie direct method. At each sample time the pending waiting time is
// discarded and redrawn, which leaves the law unchanged (memorylessness) and
// lets the myopic policy change the control there.
inline SimResult simulate(const ModelParams& p, const SimConfig& cfg) {
  p.validate();
  cfg.validate();
  const std::vector<double> times = sample_times(cfg.horizon, cfg.sample_interval);
  SimResult out;
  out.trajectory.reserve(times.size());
  out.control.reserve(times.size());
  out.counts.reserve(times.size());

  Rng rng(cfg.seed);
  AgentCounts c = AgentCounts::from_fractions(cfg.x0, cfg.n_agents);
  ControlVector u = cfg.control;
  const bool myopic = cfg.policy == PolicyKind::kMyopic;
  detail::MyopicController controller(p, out);
  if (myopic) {
    const auto sols = enumerate_hjb(p, c.fractions());
    if (sols.empty())
      out.no_solution_times.push_back(0.0);
    else
      u = sols.front().control();
  }

  const auto record = [&](double t) {
    out.trajectory.push_back({t, c.fractions()});
    out.control.push_back(u);
    out.counts.push_back(c);
  };
  record(times.front());

  double t = times.front();
  std::size_t next = 1;
  while (next < times.size()) {
    const EventRates r = event_rates(p, c, u);
    double total = 0.0;
    for (double v : r) total += v;
    const double wait = total > 0.0 ? rng.exponential(total) : std::numeric_limits<double>::infinity();
    if (t + wait >= times[next]) {
      t = times[next++];
      if (myopic && cfg.cadence == Cadence::kPerInterval) u = controller.update(t, c.fractions(), u);
      record(t);
      continue;
    }
    t += wait;
    detail::apply_jump(c, detail::pick_event(r, total, rng.uniform()));
    ++out.events;
    if (myopic && cfg.cadence == Cadence::kPerEvent) u = controller.update(t, c.fractions(), u);
  }
  return out;
}

inline SimResult simulate_myopic(const ModelParams& p, SimConfig cfg) {
  cfg.policy = PolicyKind::kMyopic;
  return simulate(p, cfg);
}

// Sup over sample times of the sup-norm gap between the empirical trajectory
// and the kinetic solution started from the same point.
inline double compare_ode(const Trajectory& empirical, const ModelParams& p, const ControlVector& u,
                          double step = 0.0) {
  if (empirical.empty()) return 0.0;
  std::vector<double> times;
  times.reserve(empirical.size());
  for (const auto& pt : empirical) times.push_back(pt.t);
  const Trajectory ode =
      integrate_at(p, empirical.front().x, u, times, step > 0.0 ? step : default_step(p));
  double dev = 0.0;
  for (std::size_t k = 0; k < ode.size(); ++k)
    dev = std::max(dev, sup_distance(ode[k].x.values(), empirical[k].x.values()));
  return dev;
}

struct DeviationStats {
  std::vector<double> per_replica;  // replica r used seed = base seed + r
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation (n - 1)
};

// Runs `replicas` fixed-policy simulations, concurrently when threads != 1.
// The reduction walks replicas in index order, so results do not depend on
// scheduling.
inline DeviationStats compare_ode_replicas(const ModelParams& p, const SimConfig& cfg,
                                           std::size_t replicas, unsigned threads = 0,
                                           double step = 0.0) {
  if (replicas == 0) throw InvalidArgument("need at least one replica");
  if (cfg.policy != PolicyKind::kFixed) throw InvalidArgument("comparison needs a fixed control");
  DeviationStats st;
  st.per_replica.assign(replicas, 0.0);
  const auto run = [&](std::size_t r) {
    SimConfig c = cfg;
    c.seed = cfg.seed + r;
    st.per_replica[r] = compare_ode(simulate(p, c).trajectory, p, cfg.control, step);
  };
  unsigned workers = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, replicas));
  if (workers <= 1) {
    for (std::size_t r = 0; r < replicas; ++r) run(r);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
      pool.emplace_back([&, w] {
        for (std::size_t r = w; r < replicas; r += workers) run(r);
      });
    for (auto& th : pool) th.join();
  }
  double sum = 0.0;
  for (double v : st.per_replica) sum += v;
  st.mean = sum / static_cast<double>(replicas);
  if (replicas > 1) {
    double ss = 0.0;
    for (double v : st.per_replica) ss += (v - st.mean) * (v - st.mean);
    st.stddev = std::sqrt(ss / static_cast<double>(replicas - 1));
  }
  return st;
}

}  // namespace botnet

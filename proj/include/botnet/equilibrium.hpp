#pragma once

// Stationary mean-field equilibria: stationary points x of the kinetic
// dynamics under a strategy u such that u is individually optimal given x.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "botnet/fixedpoint.hpp"
#include "botnet/hjb.hpp"
#include "botnet/model.hpp"

namespace botnet {

struct Equilibrium {
  StateDist x;
  ControlVector u;
  StrategyCase strategy = StrategyCase::kUnprotected;
  Vec4 g{};
  double mu = 0.0;
  numeric::Eigen3 eigenvalues{};
  bool stable = false;
  bool efficient = false;
  bool degenerate = false;  // an HJB validity margin is within tolerance of zero
  FixedPointMethod method = FixedPointMethod::kClosedForm;
};

inline constexpr double kEfficiencyTieTolerance = 1e-12;

// Equilibria sorted by mu; the efficient flag marks every equilibrium whose
// mu ties the minimum.
inline std::vector<Equilibrium> solve_mfg(const ModelParams& p, const FixedPointOptions& opts = {}) {
  std::vector<Equilibrium> out;
  for (StrategyCase c : kAllCases) {
    for (const FixedPoint& fp : fixed_points(p, c, opts)) {
      HjbSolution h;
      try {
        h = solve_case(p, fp.x, c);
      } catch (const DegenerateDenominator&) {
        continue;
      }
      if (!h.valid) continue;
      Equilibrium e;
      e.x = fp.x;
      e.u = control_of(c);
      e.strategy = c;
      e.g = h.g;
      e.mu = h.mu;
      e.eigenvalues = fp.eigenvalues;
      e.stable = fp.stable;
      e.degenerate = h.degenerate;
      e.method = fp.method;
      out.push_back(e);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Equilibrium& a, const Equilibrium& b) { return a.mu < b.mu; });
  if (!out.empty()) {
    const double best = out.front().mu;
    for (Equilibrium& e : out)
      e.efficient = e.mu <= best + kEfficiencyTieTolerance * std::max(1.0, std::abs(best));
  }
  return out;
}

// kappa(z) = ((q_inf_U - q_inf_D) v_H + z (beta_UU - beta_UD)) / (q_inf_U v_H + z beta_UU + q):
// the large-lambda switching threshold (beta - alpha)/(beta + q) at x = (0, *, z, *).
// Requires equal recovery rates q = q_rec_D = q_rec_U.
inline double kappa_of_z(const ModelParams& p, double z) {
  if (!p.has_equal_recovery())
    throw AssumptionViolation("kappa(z) needs q_rec_D == q_rec_U");
  return ((p.q_inf_U - p.q_inf_D) * p.v_H + z * (p.beta_UU - p.beta_UD)) /
         (p.attack_U() + z * p.beta_UU + p.q_rec_U);
}

// kappa(z) is increasing on [0, 1] iff this holds (decreasing otherwise).
inline bool kappa_of_z_increasing(const ModelParams& p) {
  const double q = p.q_rec_U;
  return p.beta_UU * (p.attack_D() + q) > p.beta_UD * (p.attack_U() + q);
}

struct BifurcationReport {
  double x_star_UI = 0.0;      // case (i) stationary point
  double x_star_DI = 0.0;      // case (ii) stationary point
  double x_bar_star_UI = 0.0;  // case (iii) stationary point, large-lambda form
  // Only with equal recovery rates.
  std::optional<double> kappa_star;
  std::optional<double> kappa_bar_star;
  // (beta-alpha)/(beta+q_U) at x*_UI, delta/(alpha+q_D) at x*_DI,
  // delta/(alpha+q_D) at x-bar*_UI, (beta-alpha)/(beta+q_U) at x-bar*_UI.
  std::array<double, 4> kappa{};
  std::array<DomainInfo, 3> domains{};  // at the three points above
  bool kappa_increasing = false;

  // Every finite threshold, for near-bifurcation tagging.
  std::vector<double> all_thresholds() const {
    std::vector<double> t;
    for (double k : kappa)
      if (std::isfinite(k)) t.push_back(k);
    return t;
  }
};

inline BifurcationReport kappa_thresholds(const ModelParams& p) {
  BifurcationReport r;
  const FixedPoint fi = fixed_point_acyclic(p, StrategyCase::kUnprotected);
  const FixedPoint fii = fixed_point_acyclic(p, StrategyCase::kDefended);
  const FixedPoint fiii = fixed_point_mixed_asymptotic(p, StrategyCase::kDefendSusceptible);
  r.x_star_UI = fi.x[UI];
  r.x_star_DI = fii.x[DI];
  r.x_bar_star_UI = fiii.x[UI];
  r.domains = {classify_domain(p, fi.x), classify_domain(p, fii.x), classify_domain(p, fiii.x)};

  const auto switch_ratio = [&](const EffectiveRates& e) {
    return (e.beta - e.alpha) / (e.beta + p.q_rec_U);
  };
  const auto recovery_ratio = [&](const EffectiveRates& e) {
    return p.delta() / (e.alpha + p.q_rec_D);
  };
  r.kappa = {switch_ratio(r.domains[0].rates), recovery_ratio(r.domains[1].rates),
             recovery_ratio(r.domains[2].rates), switch_ratio(r.domains[2].rates)};
  r.kappa_increasing = kappa_of_z_increasing(p);
  if (p.has_equal_recovery()) {
    r.kappa_star = kappa_of_z(p, r.x_star_UI);
    r.kappa_bar_star = kappa_of_z(p, r.x_bar_star_UI);
  }
  return r;
}

struct SweepOptions {
  double window_constant = 10.0;  // rows within window_constant / lambda of a threshold are tagged
  unsigned threads = 0;           // 0 = hardware concurrency
  FixedPointOptions fixed_point{};
};

struct SweepRow {
  double kappa = 0.0;
  std::vector<StrategyCase> cases;  // in mu order
  std::vector<double> mus;
  std::vector<bool> stable;
  bool near_bifurcation = false;

  std::size_t count() const { return cases.size(); }
  double mu_min() const {
    return mus.empty() ? std::numeric_limits<double>::quiet_NaN() : mus.front();
  }
  bool stable_all() const {
    return std::all_of(stable.begin(), stable.end(), [](bool s) { return s; });
  }
};

// Varies k_D = kappa * k_I over an even grid with k_I fixed. Grid points are
// solved concurrently; rows come back in grid order.
inline std::vector<SweepRow> sweep_kappa(const ModelParams& p, double kappa_min, double kappa_max,
                                         std::size_t steps, const SweepOptions& opts = {}) {
  if (!(kappa_min >= 0.0 && kappa_min < kappa_max))
    throw InvalidArgument("sweep needs 0 <= kappa_min < kappa_max");
  if (steps < 2) throw InvalidArgument("sweep needs at least 2 steps");

  const std::vector<double> thresholds = kappa_thresholds(p).all_thresholds();
  const double window = opts.window_constant / p.lambda;
  std::vector<SweepRow> rows(steps);

  const auto solve_row = [&](std::size_t i) {
    SweepRow& row = rows[i];
    row.kappa = kappa_min + (kappa_max - kappa_min) * static_cast<double>(i) /
                                static_cast<double>(steps - 1);
    ModelParams q = p;
    q.k_D = row.kappa * p.k_I;
    for (const Equilibrium& e : solve_mfg(q, opts.fixed_point)) {
      row.cases.push_back(e.strategy);
      row.mus.push_back(e.mu);
      row.stable.push_back(e.stable);
    }
    row.near_bifurcation = std::any_of(thresholds.begin(), thresholds.end(), [&](double t) {
      return std::abs(row.kappa - t) <= window;
    });
  };

  unsigned workers = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, steps));
  if (workers <= 1) {
    for (std::size_t i = 0; i < steps; ++i) solve_row(i);
    return rows;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t i = w; i < steps; i += workers) solve_row(i);
    });
  for (auto& t : pool) t.join();
  return rows;
}

}  // namespace botnet

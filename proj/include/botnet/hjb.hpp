#pragma once

// Stationary (ergodic) HJB equation of an individual computer owner:
//
//   lambda * min(g(UI) - g(DI), 0) + q_rec_D (g(DS) - g(DI)) + k_I + k_D = mu
//   lambda * min(g(US) - g(DS), 0) + alpha   (g(DI) - g(DS)) + k_D       = mu
//   lambda * min(g(DI) - g(UI), 0) + q_rec_U (g(US) - g(UI)) + k_I       = mu
//   lambda * min(g(DS) - g(US), 0) + beta    (g(UI) - g(US))             = mu
//
// solved in closed form for each of the four admissible pure strategies.

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "botnet/model.hpp"

namespace botnet {

inline constexpr double kSlackTolerance = 1e-9;
inline constexpr double kDenominatorFloor = 1e-14;

struct HjbSolution {
  StrategyCase strategy = StrategyCase::kUnprotected;
  Vec4 g{};  // relative values, shifted so that min g == 0
  double mu = 0.0;
  bool valid = false;
  bool degenerate = false;
  // Optimality margins of the strategy's two switching decisions (infected
  // pair, susceptible pair); >= 0 means the strategy's control attains the min.
  std::array<double, 2> slack{};

  ControlVector control() const { return control_of(strategy); }
};

namespace detail {

inline void require_denominator(double d, const char* what) {
  if (!(d > kDenominatorFloor))
    throw DegenerateDenominator(std::string("closed-form denominator vanishes: ") + what);
}

inline Vec4 shift_to_zero_min(Vec4 g) {
  const double m = *std::min_element(g.begin(), g.end());
  for (double& v : g) v -= m;
  return g;
}

}  // namespace detail

// Closed-form solution for one strategy, given the effective infection rates.
inline HjbSolution solve_case(const ModelParams& p, const EffectiveRates& rates,
                              StrategyCase strategy) {
  const double a = rates.alpha;
  const double b = rates.beta;
  const double lam = p.lambda;
  const double qD = p.q_rec_D;
  const double qU = p.q_rec_U;
  const double kD = p.k_D;
  const double kI = p.k_I;
  detail::require_denominator(lam, "lambda");

  HjbSolution s;
  s.strategy = strategy;
  Vec4& g = s.g;
  switch (strategy) {
    case StrategyCase::kUnprotected: {  // g(US) = 0
      detail::require_denominator(b + qU, "beta + q_rec_U");
      detail::require_denominator(a + lam + qD, "alpha + lambda + q_rec_D");
      g[UI] = kI / (b + qU);
      s.mu = b * g[UI];
      const double common = (kD - s.mu) / lam;
      const double scale = kI * (b + lam + qU) / (lam * (b + qU) * (a + lam + qD));
      g[DS] = common + scale * a;
      g[DI] = common + scale * (a + lam);
      g[US] = 0.0;
      s.slack = {g[DI] - g[UI], g[DS] - g[US]};
      break;
    }
    case StrategyCase::kDefended: {  // g(DS) = 0
      detail::require_denominator(a + qD, "alpha + q_rec_D");
      detail::require_denominator(b + lam + qU, "beta + lambda + q_rec_U");
      g[DI] = kI / (a + qD);
      s.mu = kD + a * g[DI];
      const double denom = lam * (a + qD) * (b + lam + qU);
      g[US] = -kD / lam + kI * (b * (lam + qD) - a * (lam + qU)) / denom;
      g[UI] = -kD / lam + kI * ((b + lam) * (lam + qD) - a * qU) / denom;
      g[DS] = 0.0;
      s.slack = {g[UI] - g[DI], g[US] - g[DS]};
      break;
    }
    case StrategyCase::kDefendSusceptible: {  // g(DS) = 0
      const double denom = a * (b + lam + qU) + qU * (a + lam + qD);
      detail::require_denominator(denom, "alpha (beta + lambda + q_rec_U) + q_rec_U (alpha + lambda + q_rec_D)");
      g[DI] = (b + lam + qU) * (kI - kD) / denom;
      g[US] = (kI * (b * (lam + qD) - a * (lam + qU)) - kD * (b + qU) * (a + lam + qD)) /
              (lam * denom);
      g[UI] = (kI * ((lam + qD) * (lam + b) - a * qU) - kD * (b + lam + qU) * (a + lam + qD)) /
              (lam * denom);
      g[DS] = 0.0;
      s.mu = (kI * a * (b + lam + qU) + kD * qU * (a + lam + qD)) / denom;
      s.slack = {g[DI] - g[UI], g[US] - g[DS]};
      break;
    }
    case StrategyCase::kDefendInfected: {  // g(US) = 0
      const double denom = b * (a + lam + qD) + qD * (b + lam + qU);
      detail::require_denominator(denom, "beta (alpha + lambda + q_rec_D) + q_rec_D (beta + lambda + q_rec_U)");
      g[UI] = (kD + kI) * (a + lam + qD) / denom;
      g[DS] = (kD * (b + lam + qU) * (a + qD) + kI * (a * (lam + qU) - b * (lam + qD))) /
              (lam * denom);
      g[DI] = (kD * (b + lam + qU) * (a + lam + qD) + kI * ((a + lam) * (lam + qU) - b * qD)) /
              (lam * denom);
      g[US] = 0.0;
      s.mu = b * g[UI];
      s.slack = {g[UI] - g[DI], g[DS] - g[US]};
      break;
    }
  }
  g = detail::shift_to_zero_min(g);
  s.valid = s.slack[0] >= -kSlackTolerance && s.slack[1] >= -kSlackTolerance;
  s.degenerate = s.valid && (std::abs(s.slack[0]) <= kSlackTolerance ||
                             std::abs(s.slack[1]) <= kSlackTolerance);
  return s;
}

inline HjbSolution solve_case(const ModelParams& p, const StateDist& x, StrategyCase strategy) {
  return solve_case(p, alpha_beta(p, x), strategy);
}

// Residual of the four HJB lines with the control held fixed at u.
inline Vec4 hjb_residual(const ModelParams& p, const EffectiveRates& rates, const Vec4& g,
                         double mu, const ControlVector& u) {
  const double lam = p.lambda;
  return {lam * u[DI] * (g[UI] - g[DI]) + p.q_rec_D * (g[DS] - g[DI]) + p.k_I + p.k_D - mu,
          lam * u[DS] * (g[US] - g[DS]) + rates.alpha * (g[DI] - g[DS]) + p.k_D - mu,
          lam * u[UI] * (g[DI] - g[UI]) + p.q_rec_U * (g[US] - g[UI]) + p.k_I - mu,
          lam * u[US] * (g[DS] - g[US]) + rates.beta * (g[UI] - g[US]) - mu};
}

// Residual of the four HJB lines with the min over u in {0, 1} taken.
inline Vec4 hjb_min_residual(const ModelParams& p, const EffectiveRates& rates, const Vec4& g,
                             double mu) {
  const double lam = p.lambda;
  return {lam * std::min(g[UI] - g[DI], 0.0) + p.q_rec_D * (g[DS] - g[DI]) + p.k_I + p.k_D - mu,
          lam * std::min(g[US] - g[DS], 0.0) + rates.alpha * (g[DI] - g[DS]) + p.k_D - mu,
          lam * std::min(g[DI] - g[UI], 0.0) + p.q_rec_U * (g[US] - g[UI]) + p.k_I - mu,
          lam * std::min(g[DS] - g[US], 0.0) + rates.beta * (g[UI] - g[US]) - mu};
}

inline bool same_solution(const Vec4& g1, double mu1, const Vec4& g2, double mu2,
                          double tol = kSlackTolerance) {
  return std::abs(mu1 - mu2) <= tol && sup_distance(g1, g2) <= tol;
}

// All valid solutions, sorted by increasing mu. Solutions from different
// strategies that coincide (at threshold equalities) are merged into the one
// with the lowest strategy index and flagged degenerate. At most two remain.
inline std::vector<HjbSolution> enumerate_hjb(const ModelParams& p, const EffectiveRates& rates) {
  std::vector<HjbSolution> out;
  for (StrategyCase c : kAllCases) {
    HjbSolution s;
    try {
      s = solve_case(p, rates, c);
    } catch (const DegenerateDenominator&) {
      continue;
    }
    if (!s.valid) continue;
    auto dup = std::find_if(out.begin(), out.end(), [&](const HjbSolution& o) {
      return same_solution(o.g, o.mu, s.g, s.mu);
    });
    if (dup != out.end()) {
      dup->degenerate = true;
      continue;
    }
    out.push_back(s);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const HjbSolution& l, const HjbSolution& r) { return l.mu < r.mu; });
  return out;
}

inline std::vector<HjbSolution> enumerate_hjb(const ModelParams& p, const StateDist& x) {
  return enumerate_hjb(p, alpha_beta(p, x));
}

// Threshold values of kappa at which one of the validity inequalities flips.
// Names follow the numerator: "A" = (beta+lambda) q_D - (alpha+lambda) q_U,
// "B" = beta (lambda+q_D) - alpha (lambda+q_U); suffix 1 divides by
// (beta+q_U+lambda)(alpha+q_D), suffix 2 by (beta+q_U)(alpha+q_D+lambda).
struct KappaThresholds {
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;
};

inline KappaThresholds finite_lambda_thresholds(const ModelParams& p, const EffectiveRates& r) {
  const double lam = p.lambda;
  const double qD = p.q_rec_D;
  const double qU = p.q_rec_U;
  const double num_a = (r.beta + lam) * qD - (r.alpha + lam) * qU;
  const double num_b = r.beta * (lam + qD) - r.alpha * (lam + qU);
  const double den1 = (r.beta + qU + lam) * (r.alpha + qD);
  const double den2 = (r.beta + qU) * (r.alpha + qD + lam);
  return {num_a / den1, num_a / den2, num_b / den1, num_b / den2};
}

// lambda -> infinity limits of the same four thresholds.
inline KappaThresholds limit_thresholds(const ModelParams& p, const EffectiveRates& r) {
  const double d = p.delta();
  const double diff = r.beta - r.alpha;
  return {d / (r.alpha + p.q_rec_D), d / (r.beta + p.q_rec_U), diff / (r.alpha + p.q_rec_D),
          diff / (r.beta + p.q_rec_U)};
}

// Strategy set admitted by a set of thresholds: (i) needs kappa above a2 and
// b2, (ii) below a1 and b1, (iii) in [a1, b2], (iv) in [b1, a2].
inline std::vector<StrategyCase> cases_admitted(const KappaThresholds& t, double kappa) {
  std::vector<StrategyCase> out;
  if (kappa >= std::max(t.a2, t.b2)) out.push_back(StrategyCase::kUnprotected);
  if (kappa <= std::min(t.a1, t.b1)) out.push_back(StrategyCase::kDefended);
  if (kappa >= t.a1 && kappa <= t.b2) out.push_back(StrategyCase::kDefendSusceptible);
  if (kappa >= t.b1 && kappa <= t.a2) out.push_back(StrategyCase::kDefendInfected);
  return out;
}

struct LargeLambdaPrediction {
  std::vector<StrategyCase> cases;  // sorted by strategy index
  DomainInfo domain;
  KappaThresholds limits;
  // max(rates)^2 / lambda; no sharpness is claimed for this constant.
  double heuristic_half_width = 0.0;
  // Largest distance between a finite-lambda threshold and its limit.
  double threshold_shift = 0.0;
  // Prediction is exact for kappa farther than this from every limit threshold.
  double half_width() const { return std::max(heuristic_half_width, threshold_shift); }
};

// Strategy set for lambda >> rates, decided by domain and subdomain of x.
inline LargeLambdaPrediction large_lambda_classify(const ModelParams& p, const StateDist& x,
                                                   double kappa) {
  using SC = StrategyCase;
  LargeLambdaPrediction out;
  out.domain = classify_domain(p, x);
  const EffectiveRates r = out.domain.rates;
  out.limits = limit_thresholds(p, r);
  const KappaThresholds fin = finite_lambda_thresholds(p, r);
  out.threshold_shift = std::max({std::abs(fin.a1 - out.limits.a1), std::abs(fin.a2 - out.limits.a2),
                                  std::abs(fin.b1 - out.limits.b1), std::abs(fin.b2 - out.limits.b2)});
  const double rmax = std::max({p.q_rec_D, p.q_rec_U, r.alpha, r.beta, p.beta_UU, p.beta_UD,
                                p.beta_DU, p.beta_DD, p.attack_D(), p.attack_U()});
  out.heuristic_half_width = rmax * rmax / p.lambda;

  // delta/(alpha+q_D), (beta-alpha)/(beta+q_U), (beta-alpha)/(alpha+q_D), delta/(beta+q_U)
  const double a = out.limits.a1;
  const double b = out.limits.b2;
  const double c = out.limits.b1;
  const double d = out.limits.a2;
  std::vector<SC>& cs = out.cases;
  if (p.delta() < 0.0 || out.domain.domain == Domain::kBoundary) {
    cs = cases_admitted(out.limits, kappa);
  } else if (out.domain.domain == Domain::kD1) {
    if (out.domain.subdomain == Subdomain::kJ1) {
      cs = {kappa < a ? SC::kDefended : kappa < b ? SC::kDefendSusceptible : SC::kUnprotected};
    } else if (kappa > b && kappa < a) {
      cs = {SC::kUnprotected, SC::kDefended};
    } else {
      cs = {kappa <= b ? SC::kDefended : SC::kUnprotected};
    }
  } else {
    if (out.domain.subdomain == Subdomain::kJ1 && kappa > a && kappa < b) {
      cs = {SC::kDefendSusceptible, SC::kDefendInfected};
    } else {
      cs = {kappa < c ? SC::kDefended : kappa > d ? SC::kUnprotected : SC::kDefendInfected};
    }
  }
  return out;
}

}  // namespace botnet

#pragma once

// Stationary points of the kinetic equation under each pure strategy, and
// their linear stability.

#include <array>
#include <cmath>
#include <complex>
#include <string_view>
#include <vector>

#include "botnet/model.hpp"
#include "botnet/numeric.hpp"

namespace botnet {

enum class FixedPointMethod { kClosedForm, kQuarticNumeric, kLargeLambda };

inline std::string_view method_label(FixedPointMethod m) {
  switch (m) {
    case FixedPointMethod::kClosedForm: return "closed_form";
    case FixedPointMethod::kQuarticNumeric: return "quartic_numeric";
    case FixedPointMethod::kLargeLambda: return "large_lambda";
  }
  return "?";
}

inline constexpr double kFixedPointResidual = 1e-9;
inline constexpr double kStabilityMargin = 1e-12;

struct FixedPoint {
  StateDist x;
  StrategyCase strategy = StrategyCase::kUnprotected;
  numeric::Eigen3 eigenvalues{};  // decreasing real part
  bool stable = false;
  FixedPointMethod method = FixedPointMethod::kClosedForm;
  // False when the endemic quadratic has no root in (0, 1) and the disease-free
  // boundary point was returned instead.
  bool interior_root = true;
};

struct EndemicRoot {
  double y = 0.0;
  bool interior = true;
};

// Root in (0, 1) of  contact*y^2 + y*(recovery - contact + attack) - attack,
// the balance (1 - y)(attack + contact*y) = recovery*y of an SIS-type block.
inline EndemicRoot endemic_root(double contact, double recovery, double attack) {
  if (attack > 0.0) {
    if (contact > 0.0) {
      const double b = recovery - contact + attack;
      const double s = std::sqrt(b * b + 4.0 * contact * attack);
      return {b >= 0.0 ? 2.0 * attack / (b + s) : (s - b) / (2.0 * contact), true};
    }
    return {attack / (recovery + attack), true};
  }
  if (contact > recovery) return {1.0 - recovery / contact, true};
  return {0.0, false};
}

// Jacobian of the dynamics restricted to the simplex, in the chart
// (x_DI, D = x_DI + x_DS, x_UI). The D row only sees switching, so it is
// written out directly rather than as a sum of cancelling contact terms.
inline numeric::Mat3 reduced_jacobian(const ModelParams& p, const StateDist& x,
                                      const ControlVector& u) {
  const auto J = kinetic_jacobian(p, x, u);
  numeric::Mat3 R{};
  const std::array<std::size_t, 2> rows{DI, UI};
  for (std::size_t k = 0; k < 2; ++k) {
    const auto& r = J[rows[k]];
    R[2 * k] = {r[DI] - r[DS], r[DS] - r[US], r[UI] - r[US]};
  }
  const double lam = p.lambda;
  R[1] = {lam * (u[DS] - u[DI]), -lam * (u[DS] + u[US]), lam * (u[UI] - u[US])};
  return R;
}

inline FixedPoint stability(const ModelParams& p, FixedPoint fp) {
  const auto R = reduced_jacobian(p, fp.x, control_of(fp.strategy));
  fp.eigenvalues = numeric::eigenvalues(R);
  fp.stable = true;
  for (const auto& ev : fp.eigenvalues)
    if (!(ev.real() < -kStabilityMargin)) fp.stable = false;
  return fp;
}

inline double fixed_point_residual(const ModelParams& p, const FixedPoint& fp) {
  return sup_norm(kinetic_rhs(p, fp.x, control_of(fp.strategy)).dx);
}

namespace detail {

inline bool is_acyclic(StrategyCase c) {
  return c == StrategyCase::kUnprotected || c == StrategyCase::kDefended;
}

inline FixedPoint relabeled(const FixedPoint& fp) {
  FixedPoint r = fp;
  r.x = fp.x.relabeled();
  r.strategy = botnet::relabeled(fp.strategy);
  return r;
}

}  // namespace detail

// Case (i): (0, 0, x*, 1 - x*) with x* the endemic root of the unprotected
// block; case (ii): (x*, 1 - x*, 0, 0) from the defended block.
inline FixedPoint fixed_point_acyclic(const ModelParams& p, StrategyCase c) {
  if (!detail::is_acyclic(c)) throw InvalidArgument("fixed_point_acyclic needs case (i) or (ii)");
  FixedPoint fp;
  if (c == StrategyCase::kUnprotected) {
    const EndemicRoot r = endemic_root(p.beta_UU, p.q_rec_U, p.attack_U());
    fp.x = StateDist::normalized({0.0, 0.0, r.y, 1.0 - r.y});
    fp.interior_root = r.interior;
  } else {
    const EndemicRoot r = endemic_root(p.beta_DD, p.q_rec_D, p.attack_D());
    fp.x = StateDist::normalized({r.y, 1.0 - r.y, 0.0, 0.0});
    fp.interior_root = r.interior;
  }
  fp.strategy = c;
  fp.method = FixedPointMethod::kClosedForm;
  return stability(p, fp);
}

// Polynomial in y = x_DI whose roots are the case-(iii) stationary points:
// x_US = x_DI, x_UI = y (q_inf_U v_H + beta_DU y + lambda) / (q_rec_U - beta_UU y),
// substituted into the defended-susceptible balance and multiplied through by
// (q_rec_U - beta_UU y)^2. Degree at most four.
inline numeric::Polynomial mixed_case_polynomial(const ModelParams& p) {
  using numeric::Polynomial;
  const Polynomial y({0.0, 1.0});
  const Polynomial den({p.q_rec_U, -p.beta_UU});
  const Polynomial num({0.0, p.attack_U() + p.lambda, p.beta_DU});
  const Polynomial susceptible = den - num - y * den * 2.0;  // den * x_DS
  const Polynomial alpha = den * p.attack_D() + y * den * p.beta_DD + num * p.beta_UD;  // den * alpha
  return susceptible * alpha - y * den * den * (p.q_rec_D + p.lambda);
}

struct FixedPointOptions {
  numeric::RootScanOptions scan{};
};

namespace detail {

inline std::vector<FixedPoint> mixed_iii(const ModelParams& p, const FixedPointOptions& opts) {
  std::vector<FixedPoint> out;
  if (!(p.q_rec_U > 0.0)) return out;
  // x_DS >= 0 forces y <= 1/2; x_UI >= 0 forces y below the pole q_rec_U / beta_UU.
  double hi = 0.5;
  if (p.beta_UU > 0.0) hi = std::min(hi, p.q_rec_U / p.beta_UU * (1.0 - 1e-12));
  const numeric::Polynomial poly = mixed_case_polynomial(p);
  for (double y : numeric::real_roots_in(poly, 0.0, hi, opts.scan)) {
    const double den = p.q_rec_U - p.beta_UU * y;
    if (!(den > 0.0)) continue;
    const double ui = y * (p.attack_U() + p.beta_DU * y + p.lambda) / den;
    const double ds = 1.0 - ui - 2.0 * y;
    if (ui > 1.0 + 1e-12 || ds < -1e-12) continue;
    FixedPoint fp;
    fp.x = StateDist::normalized({y, ds, ui, y});
    fp.strategy = StrategyCase::kDefendSusceptible;
    fp.method = FixedPointMethod::kQuarticNumeric;
    fp.interior_root = y > 0.0;
    if (fixed_point_residual(p, fp) > kFixedPointResidual) continue;
    out.push_back(stability(p, fp));
  }
  return out;
}

}  // namespace detail

// Case (iii) by root bracketing of the quartic; case (iv) through the D <-> U
// relabeling, which maps case (iv) for p onto case (iii) for p.relabeled().
inline std::vector<FixedPoint> fixed_point_mixed(const ModelParams& p, StrategyCase c,
                                                 const FixedPointOptions& opts = {}) {
  if (c == StrategyCase::kDefendSusceptible) return detail::mixed_iii(p, opts);
  if (c != StrategyCase::kDefendInfected)
    throw InvalidArgument("fixed_point_mixed needs case (iii) or (iv)");
  std::vector<FixedPoint> out;
  for (const FixedPoint& fp : detail::mixed_iii(p.relabeled(), opts))
    out.push_back(stability(p, detail::relabeled(fp)));
  return out;
}

// Leading-order stationary point for lambda >> rates. Case (iii) concentrates
// on (0, 1 - y, y, 0) with y the endemic root of (beta_UD, q_rec_U, q_inf_D v_H);
// case (iv) on (y, 0, 0, 1 - y) with y the root of (beta_DU, q_rec_D, q_inf_U v_H).
// The point solves the dynamics only up to O(1/lambda).
inline FixedPoint fixed_point_mixed_asymptotic(const ModelParams& p, StrategyCase c) {
  FixedPoint fp;
  if (c == StrategyCase::kDefendSusceptible) {
    const EndemicRoot r = endemic_root(p.beta_UD, p.q_rec_U, p.attack_D());
    fp.x = StateDist::normalized({0.0, 1.0 - r.y, r.y, 0.0});
    fp.interior_root = r.interior;
  } else if (c == StrategyCase::kDefendInfected) {
    const EndemicRoot r = endemic_root(p.beta_DU, p.q_rec_D, p.attack_U());
    fp.x = StateDist::normalized({r.y, 0.0, 0.0, 1.0 - r.y});
    fp.interior_root = r.interior;
  } else {
    throw InvalidArgument("fixed_point_mixed_asymptotic needs case (iii) or (iv)");
  }
  fp.strategy = c;
  fp.method = FixedPointMethod::kLargeLambda;
  return stability(p, fp);
}

// Every stationary point of the given strategy: one for the acyclic cases,
// all bracketed quartic roots for the mixed ones.
inline std::vector<FixedPoint> fixed_points(const ModelParams& p, StrategyCase c,
                                            const FixedPointOptions& opts = {}) {
  if (detail::is_acyclic(c)) return {fixed_point_acyclic(p, c)};
  return fixed_point_mixed(p, c, opts);
}

}  // namespace botnet

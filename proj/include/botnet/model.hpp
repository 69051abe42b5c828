#pragma once

// Parameters, population states and the kinetic (N -> infinity) dynamics of
// the four-state botnet defense model.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "botnet/errors.hpp"

namespace botnet {

// Index order used by every 4-vector in the library.
enum State : std::size_t { DI = 0, DS = 1, UI = 2, US = 3 };

inline constexpr std::array<std::string_view, 4> kStateNames{"DI", "DS", "UI", "US"};

using Vec4 = std::array<double, 4>;

inline double sup_norm(const Vec4& v) {
  double m = 0.0;
  for (double c : v) m = std::max(m, std::abs(c));
  return m;
}

inline double sup_distance(const Vec4& a, const Vec4& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < 4; ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

struct ModelParams {
  double q_rec_D = 0.0;  // recovery rate of defended computers
  double q_rec_U = 0.0;  // recovery rate of unprotected computers
  double q_inf_D = 0.0;  // direct infection coefficient, defended
  double q_inf_U = 0.0;  // direct infection coefficient, unprotected
  // Contact rates, first letter = infector, second = susceptible.
  double beta_UU = 0.0;
  double beta_UD = 0.0;
  double beta_DU = 0.0;
  double beta_DD = 0.0;
  double lambda = 1.0;  // rate at which a switching decision is executed
  double v_H = 0.0;     // herder effort, held fixed
  double k_D = 0.0;     // defense fee per unit time
  double k_I = 1.0;     // infection loss per unit time

  double kappa() const { return k_D / k_I; }
  double delta() const { return q_rec_D - q_rec_U; }
  double attack_D() const { return q_inf_D * v_H; }
  double attack_U() const { return q_inf_U * v_H; }

  bool satisfies_base_assumptions() const {
    return q_rec_D >= q_rec_U && q_inf_D < q_inf_U && beta_UD <= beta_UU &&
           beta_DD <= beta_DU && k_D <= k_I;
  }
  // Contact infection depends only on the susceptible side.
  bool has_susceptible_side_contact() const {
    return beta_DU == beta_UU && beta_UD == beta_DD;
  }
  bool has_equal_recovery() const { return q_rec_D == q_rec_U; }
  bool recovery_gap_below_attack_gap() const {
    return q_rec_D - q_rec_U < (q_inf_U - q_inf_D) * v_H;
  }

  double max_rate() const {
    return std::max({q_rec_D, q_rec_U, attack_D(), attack_U(), beta_UU, beta_UD,
                     beta_DU, beta_DD, lambda});
  }

  // Throws InvalidParams when a field is negative/non-finite, lambda <= 0 or k_I <= 0.
  void validate() const {
    const std::array<std::pair<const char*, double>, 12> fields{{
        {"q_rec_D", q_rec_D}, {"q_rec_U", q_rec_U}, {"q_inf_D", q_inf_D},
        {"q_inf_U", q_inf_U}, {"beta_UU", beta_UU}, {"beta_UD", beta_UD},
        {"beta_DU", beta_DU}, {"beta_DD", beta_DD}, {"lambda", lambda},
        {"v_H", v_H},         {"k_D", k_D},         {"k_I", k_I}}};
    for (const auto& [name, value] : fields) {
      if (!std::isfinite(value) || value < 0.0)
        throw InvalidParams(std::string(name) + " must be finite and nonnegative");
    }
    if (lambda <= 0.0) throw InvalidParams("lambda must be positive");
    if (k_I <= 0.0) throw InvalidParams("k_I must be positive");
  }

  // The D <-> U relabeling: swaps protection status of every rate.
  ModelParams relabeled() const {
    ModelParams p = *this;
    std::swap(p.q_rec_D, p.q_rec_U);
    std::swap(p.q_inf_D, p.q_inf_U);
    std::swap(p.beta_DD, p.beta_UU);
    std::swap(p.beta_DU, p.beta_UD);
    return p;
  }

  bool operator==(const ModelParams&) const = default;
};

// A point of the probability simplex over {DI, DS, UI, US}.
class StateDist {
 public:
  static constexpr double kSumTolerance = 1e-9;

  StateDist() : x_{0.0, 0.0, 0.0, 1.0} {}

  // Accepts |sum - 1| <= 1e-9 and components >= -1e-9, then clips and renormalizes.
  static StateDist make(const Vec4& raw) {
    double sum = 0.0;
    for (double c : raw) {
      if (!std::isfinite(c) || c < -kSumTolerance)
        throw InvalidSimplex("state components must be finite and nonnegative");
      sum += c;
    }
    if (std::abs(sum - 1.0) > kSumTolerance)
      throw InvalidSimplex("state components must sum to 1");
    return normalized(raw);
  }

  static StateDist make(double di, double ds, double ui, double us) {
    return make(Vec4{di, ds, ui, us});
  }

  // Clips negatives and rescales without the sum check; the caller guarantees
  // the input is a small perturbation of a simplex point.
  static StateDist normalized(const Vec4& raw) {
    StateDist s;
    double sum = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
      s.x_[i] = std::max(raw[i], 0.0);
      sum += s.x_[i];
    }
    if (!(sum > 0.0)) throw InvalidSimplex("state has no mass");
    if (sum != 1.0)
      for (double& c : s.x_) c /= sum;
    return s;
  }

  double operator[](std::size_t i) const { return x_[i]; }
  const Vec4& values() const { return x_; }
  double infected() const { return x_[DI] + x_[UI]; }
  double defended() const { return x_[DI] + x_[DS]; }

  // Swaps D and U coordinates: (DI, DS, UI, US) -> (UI, US, DI, DS).
  StateDist relabeled() const {
    StateDist s;
    s.x_ = {x_[UI], x_[US], x_[DI], x_[DS]};
    return s;
  }

  bool operator==(const StateDist&) const = default;

 private:
  Vec4 x_;
};

// The four pure stationary strategies that can solve the HJB equation.
enum class StrategyCase : std::uint8_t {
  kUnprotected = 0,        // (i): always prefer U
  kDefended = 1,           // (ii): always prefer D
  kDefendSusceptible = 2,  // (iii): D while susceptible, U once infected
  kDefendInfected = 3,     // (iv): D once infected, U while susceptible
};

inline constexpr std::array<StrategyCase, 4> kAllCases{
    StrategyCase::kUnprotected, StrategyCase::kDefended,
    StrategyCase::kDefendSusceptible, StrategyCase::kDefendInfected};

inline std::string_view case_label(StrategyCase c) {
  static constexpr std::array<std::string_view, 4> labels{"i", "ii", "iii", "iv"};
  return labels[static_cast<std::size_t>(c)];
}

inline std::optional<StrategyCase> parse_case(std::string_view label) {
  for (StrategyCase c : kAllCases)
    if (case_label(c) == label) return c;
  return std::nullopt;
}

// Under the D <-> U relabeling (i) <-> (ii) and (iii) <-> (iv).
inline StrategyCase relabeled(StrategyCase c) {
  switch (c) {
    case StrategyCase::kUnprotected: return StrategyCase::kDefended;
    case StrategyCase::kDefended: return StrategyCase::kUnprotected;
    case StrategyCase::kDefendSusceptible: return StrategyCase::kDefendInfected;
    case StrategyCase::kDefendInfected: return StrategyCase::kDefendSusceptible;
  }
  return c;
}

// u[s] = 1 means an agent in state s requests a switch of protection status.
struct ControlVector {
  std::array<std::uint8_t, 4> u{0, 0, 0, 0};

  std::uint8_t operator[](std::size_t i) const { return u[i]; }
  bool operator==(const ControlVector&) const = default;

  // Bit i set iff u[i] == 1.
  unsigned bits() const {
    unsigned b = 0;
    for (std::size_t i = 0; i < 4; ++i) b |= static_cast<unsigned>(u[i] != 0) << i;
    return b;
  }
  static ControlVector from_bits(unsigned b) {
    ControlVector c;
    for (std::size_t i = 0; i < 4; ++i) c.u[i] = static_cast<std::uint8_t>((b >> i) & 1u);
    return c;
  }
};

inline ControlVector control_of(StrategyCase c) {
  switch (c) {
    case StrategyCase::kUnprotected: return {{1, 1, 0, 0}};
    case StrategyCase::kDefended: return {{0, 0, 1, 1}};
    case StrategyCase::kDefendSusceptible: return {{1, 0, 0, 1}};
    case StrategyCase::kDefendInfected: return {{0, 1, 1, 0}};
  }
  return {};
}

inline std::optional<StrategyCase> case_of(const ControlVector& u) {
  for (StrategyCase c : kAllCases)
    if (control_of(c) == u) return c;
  return std::nullopt;
}

struct EffectiveRates {
  double alpha = 0.0;  // infection intensity felt by a defended susceptible
  double beta = 0.0;   // infection intensity felt by an unprotected susceptible
};

inline EffectiveRates alpha_beta(const ModelParams& p, const StateDist& x) {
  return {p.attack_D() + x[DI] * p.beta_DD + x[UI] * p.beta_UD,
          p.attack_U() + x[DI] * p.beta_DU + x[UI] * p.beta_UU};
}

// Right-hand side of the kinetic equation. Three components are evaluated as
// gain - loss, where loss = x_s * (exit rate) vanishes exactly when x_s = 0.
// The component of largest mass is the closure: it is set to minus the sum of
// the other three, so `net()` is exactly zero.
struct KineticRates {
  Vec4 dx{};
  std::size_t closure = US;

  double operator[](std::size_t i) const { return dx[i]; }

  double net() const {
    double s = 0.0;
    for (std::size_t i = 0; i < 4; ++i)
      if (i != closure) s += dx[i];
    return s + dx[closure];
  }
};

inline KineticRates kinetic_rhs(const ModelParams& p, const StateDist& x,
                                const ControlVector& u) {
  const auto [alpha, beta] = alpha_beta(p, x);
  const double lam = p.lambda;
  const Vec4 gain{x[DS] * alpha + lam * x[UI] * u[UI],
                  x[DI] * p.q_rec_D + lam * x[US] * u[US],
                  x[US] * beta + lam * x[DI] * u[DI],
                  x[UI] * p.q_rec_U + lam * x[DS] * u[DS]};
  const Vec4 exit_rate{p.q_rec_D + lam * u[DI], alpha + lam * u[DS],
                       p.q_rec_U + lam * u[UI], beta + lam * u[US]};

  KineticRates r;
  r.closure = static_cast<std::size_t>(
      std::max_element(x.values().begin(), x.values().end()) - x.values().begin());
  double others = 0.0;
  for (std::size_t i = 0; i < 4; ++i) {
    if (i == r.closure) continue;
    r.dx[i] = gain[i] - x[i] * exit_rate[i];
    others += r.dx[i];
  }
  r.dx[r.closure] = -others;
  return r;
}

// Analytic Jacobian d(kinetic_rhs)_i / d x_j, treating the four coordinates as
// independent (no simplex constraint applied).
inline std::array<Vec4, 4> kinetic_jacobian(const ModelParams& p, const StateDist& x,
                                            const ControlVector& u) {
  const auto [alpha, beta] = alpha_beta(p, x);
  const double lam = p.lambda;
  // d alpha / d x_DI = beta_DD, d alpha / d x_UI = beta_UD; similarly for beta.
  const Vec4 dalpha{p.beta_DD, 0.0, p.beta_UD, 0.0};
  const Vec4 dbeta{p.beta_DU, 0.0, p.beta_UU, 0.0};
  std::array<Vec4, 4> J{};
  for (std::size_t j = 0; j < 4; ++j) {
    const double infect_D = x[DS] * dalpha[j] + (j == DS ? alpha : 0.0);
    const double infect_U = x[US] * dbeta[j] + (j == US ? beta : 0.0);
    const double recover_D = j == DI ? p.q_rec_D : 0.0;
    const double recover_U = j == UI ? p.q_rec_U : 0.0;
    const double switch_I = lam * ((j == UI ? u[UI] : 0.0) - (j == DI ? u[DI] : 0.0));
    const double switch_S = lam * ((j == US ? u[US] : 0.0) - (j == DS ? u[DS] : 0.0));
    J[DI][j] = infect_D - recover_D + switch_I;
    J[DS][j] = -infect_D + recover_D + switch_S;
    J[UI][j] = infect_U - recover_U - switch_I;
    J[US][j] = -infect_U + recover_U - switch_S;
  }
  return J;
}

enum class Domain { kD1, kD2, kBoundary };
enum class Subdomain { kJ1, kJ2, kBoundary };

inline std::string_view domain_label(Domain d) {
  switch (d) {
    case Domain::kD1: return "D1";
    case Domain::kD2: return "D2";
    case Domain::kBoundary: return "boundary";
  }
  return "?";
}

inline std::string_view subdomain_label(Subdomain s) {
  switch (s) {
    case Subdomain::kJ1: return "j1";
    case Subdomain::kJ2: return "j2";
    case Subdomain::kBoundary: return "boundary";
  }
  return "?";
}

struct DomainInfo {
  Domain domain = Domain::kBoundary;
  Subdomain subdomain = Subdomain::kBoundary;
  EffectiveRates rates;
};

inline constexpr double kDomainTolerance = 1e-12;

inline DomainInfo classify_domain(const ModelParams& p, const StateDist& x) {
  DomainInfo info;
  info.rates = alpha_beta(p, x);
  const auto [alpha, beta] = info.rates;
  const double margin = (beta + p.q_rec_U) - (alpha + p.q_rec_D);
  info.domain = std::abs(margin) <= kDomainTolerance ? Domain::kBoundary
                : margin > 0.0                       ? Domain::kD1
                                                     : Domain::kD2;
  // delta/(alpha+q_D) < (beta-alpha)/(beta+q_U), cross-multiplied (denominators >= 0).
  const double sub = (beta - alpha) * (alpha + p.q_rec_D) - p.delta() * (beta + p.q_rec_U);
  info.subdomain = std::abs(sub) <= kDomainTolerance ? Subdomain::kBoundary
                   : sub > 0.0                       ? Subdomain::kJ1
                                                     : Subdomain::kJ2;
  return info;
}

// Under susceptible-side contact rates, x lies in D1 iff x_DI + x_UI exceeds
// this threshold.
inline double susceptible_contact_d1_threshold(const ModelParams& p) {
  if (!p.has_susceptible_side_contact())
    throw AssumptionViolation("threshold form needs beta_DU == beta_UU and beta_UD == beta_DD");
  const double spread = p.beta_UU - p.beta_DD;
  if (spread == 0.0) throw AssumptionViolation("threshold undefined when beta_U == beta_D");
  return ((p.q_inf_D - p.q_inf_U) * p.v_H + p.q_rec_D - p.q_rec_U) / spread;
}

}  // namespace botnet

#pragma once

// Brute-force cross-check of the closed-form HJB solutions: every one of the
// 16 pure controls is plugged into the HJB lines, the resulting linear system
// is solved directly, and the control is kept when it attains the minimum.

#include <Eigen/Dense>

#include <algorithm>
#include <vector>

#include "botnet/hjb.hpp"
#include "botnet/model.hpp"

namespace botnet {

struct OracleSolution {
  Vec4 g{};  // shifted so that min g == 0
  double mu = 0.0;
  std::vector<ControlVector> controls;  // every control attaining the minimum
  bool degenerate = false;
};

namespace detail {

// Optimality of u against g; ties within the slack tolerance count as optimal
// for both choices and are reported through `tie`.
inline bool control_is_optimal(const Vec4& g, const ControlVector& u, bool& tie) {
  // Switching target for each state.
  const std::array<std::size_t, 4> target{UI, US, DI, DS};
  tie = false;
  for (std::size_t s = 0; s < 4; ++s) {
    const double diff = g[target[s]] - g[s];
    if (std::abs(diff) <= kSlackTolerance) tie = true;
    if (u[s] == 1 && diff > kSlackTolerance) return false;
    if (u[s] == 0 && diff < -kSlackTolerance) return false;
  }
  return true;
}

}  // namespace detail

// Throws SingularSystem when a control other than u == 0 leads to a
// rank-deficient system. With u == 0 protection never changes, the D and U
// blocks decouple and no single average cost exists, so that control is skipped.
inline std::vector<OracleSolution> oracle_enumerate(const ModelParams& p, const StateDist& x) {
  const auto [alpha, beta] = alpha_beta(p, x);
  const double lam = p.lambda;
  std::vector<OracleSolution> out;
  for (unsigned bits = 0; bits < 16; ++bits) {
    const ControlVector u = ControlVector::from_bits(bits);
    // Unknowns: g(DI), g(DS), g(UI), g(US), mu.
    Eigen::Matrix<double, 5, 5> A = Eigen::Matrix<double, 5, 5>::Zero();
    Eigen::Matrix<double, 5, 1> rhs;
    A(0, DI) = -lam * u[DI] - p.q_rec_D;
    A(0, UI) = lam * u[DI];
    A(0, DS) = p.q_rec_D;
    A(1, DS) = -lam * u[DS] - alpha;
    A(1, US) = lam * u[DS];
    A(1, DI) = alpha;
    A(2, UI) = -lam * u[UI] - p.q_rec_U;
    A(2, DI) = lam * u[UI];
    A(2, US) = p.q_rec_U;
    A(3, US) = -lam * u[US] - beta;
    A(3, DS) = lam * u[US];
    A(3, UI) = beta;
    for (int r = 0; r < 4; ++r) A(r, 4) = -1.0;
    A(4, US) = 1.0;
    rhs << -(p.k_I + p.k_D), -p.k_D, -p.k_I, 0.0, 0.0;

    Eigen::FullPivLU<Eigen::Matrix<double, 5, 5>> lu(A);
    if (lu.rank() < 5) {
      if (bits == 0) continue;
      throw SingularSystem("HJB system is rank-deficient for control " + std::to_string(bits));
    }
    const Eigen::Matrix<double, 5, 1> sol = lu.solve(rhs);
    Vec4 g{sol(0), sol(1), sol(2), sol(3)};
    bool tie = false;
    if (!detail::control_is_optimal(g, u, tie)) continue;
    g = detail::shift_to_zero_min(g);
    const double mu = sol(4);
    auto same = std::find_if(out.begin(), out.end(), [&](const OracleSolution& o) {
      return same_solution(o.g, o.mu, g, mu);
    });
    if (same != out.end()) {
      same->controls.push_back(u);
      same->degenerate = true;
    } else {
      out.push_back({g, mu, {u}, tie});
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const OracleSolution& l, const OracleSolution& r) { return l.mu < r.mu; });
  return out;
}

}  // namespace botnet

#pragma once

// Randomized self-test: closed forms against the brute-force oracle plus the
// structural invariants of the kinetic model. Used by `botnet_mfg validate`.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "botnet/agentsim.hpp"
#include "botnet/fixedpoint.hpp"
#include "botnet/hjb.hpp"
#include "botnet/hjb_oracle.hpp"
#include "botnet/sampling.hpp"

namespace botnet {

struct CheckResult {
  std::string name;
  std::uint64_t trials = 0;
  std::uint64_t failures = 0;
  double worst = 0.0;  // largest observed error measure
};

inline bool oracle_agrees(const std::vector<HjbSolution>& closed,
                          const std::vector<OracleSolution>& oracle, double tol = 1e-9) {
  if (closed.size() != oracle.size()) return false;
  for (const HjbSolution& s : closed) {
    const bool found = std::any_of(oracle.begin(), oracle.end(), [&](const OracleSolution& o) {
      return same_solution(o.g, o.mu, s.g, s.mu, tol) &&
             std::find(o.controls.begin(), o.controls.end(), s.control()) != o.controls.end();
    });
    if (!found) return false;
  }
  return true;
}

inline double hjb_residual_ratio(const ModelParams& p, const EffectiveRates& r,
                                 const HjbSolution& s) {
  return sup_norm(hjb_min_residual(p, r, s.g, s.mu)) / std::max(1.0, std::abs(s.mu));
}

inline std::vector<CheckResult> run_self_check(std::uint64_t seed, std::uint64_t trials) {
  enum { kResidual, kOracle, kCount, kFixedPoint, kGenerator, kRelabel, kChecks };
  std::vector<CheckResult> res(kChecks);
  res[kResidual].name = "hjb_residual";
  res[kOracle].name = "oracle_equivalence";
  res[kCount].name = "solution_count";
  res[kFixedPoint].name = "fixed_point_residual";
  res[kGenerator].name = "generator_identity";
  res[kRelabel].name = "kinetic_relabel_symmetry";

  const auto tally = [&](int check, double err, double tol) {
    CheckResult& c = res[check];
    ++c.trials;
    c.worst = std::max(c.worst, err);
    if (!(err <= tol)) ++c.failures;
  };

  Rng rng(seed);
  constexpr std::array<double, 3> lambdas{1.0, 10.0, 1e3};
  for (std::uint64_t t = 0; t < trials; ++t) {
    SampleSpec spec;
    spec.lambda = lambdas[t % lambdas.size()];
    spec.base_assumptions = (t / lambdas.size()) % 2 == 0;
    const ModelParams p = sample_params(rng, spec);
    const StateDist x = sample_state(rng);
    const EffectiveRates r = alpha_beta(p, x);

    const auto sols = enumerate_hjb(p, r);
    double worst = 0.0;
    for (const HjbSolution& s : sols) worst = std::max(worst, hjb_residual_ratio(p, r, s));
    tally(kResidual, worst, 1e-10);
    tally(kCount, static_cast<double>(sols.size()), 2.0);
    tally(kOracle, oracle_agrees(sols, oracle_enumerate(p, x)) ? 0.0 : 1.0, 0.0);

    double fp_worst = 0.0;
    for (StrategyCase c : kAllCases)
      for (const FixedPoint& fp : fixed_points(p, c))
        fp_worst = std::max(fp_worst, fixed_point_residual(p, fp));
    tally(kFixedPoint, fp_worst, kFixedPointResidual);

    const std::int64_t N = 1 + static_cast<std::int64_t>(rng.uniform() * 1000.0);
    const AgentCounts counts = AgentCounts::from_fractions(x, N);
    const ControlVector u = ControlVector::from_bits(static_cast<unsigned>(t % 16));
    tally(kGenerator,
          sup_distance(generator_drift(p, counts, u), kinetic_rhs(p, counts.fractions(), u).dx),
          1e-12);

    const Vec4 direct = kinetic_rhs(p, x, u).dx;
    const ControlVector ur{{u[UI], u[US], u[DI], u[DS]}};
    const Vec4 swapped = kinetic_rhs(p.relabeled(), x.relabeled(), ur).dx;
    tally(kRelabel, sup_distance({direct[UI], direct[US], direct[DI], direct[DS]}, swapped), 1e-12);
  }
  return res;
}

}  // namespace botnet

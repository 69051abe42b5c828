#pragma once

// Random parameter sets and simplex points for randomized checks.

#include <algorithm>
#include <utility>

#include "botnet/agentsim.hpp"
#include "botnet/model.hpp"

namespace botnet {

struct SampleSpec {
  double rate_lo = 0.1;
  double rate_hi = 5.0;
  double lambda = 1.0;
  bool base_assumptions = true;  // order the rate pairs as the base assumptions require
  bool equal_recovery = false;
};

inline double uniform_in(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

inline ModelParams sample_params(Rng& rng, const SampleSpec& s) {
  ModelParams p;
  const auto draw = [&] { return uniform_in(rng, s.rate_lo, s.rate_hi); };
  p.q_rec_D = draw();
  p.q_rec_U = draw();
  p.q_inf_D = draw();
  p.q_inf_U = draw();
  p.beta_UU = draw();
  p.beta_UD = draw();
  p.beta_DU = draw();
  p.beta_DD = draw();
  p.v_H = draw();
  p.k_I = draw();
  p.k_D = draw();
  p.lambda = s.lambda;
  if (s.base_assumptions) {
    if (p.q_rec_D < p.q_rec_U) std::swap(p.q_rec_D, p.q_rec_U);
    if (p.q_inf_D > p.q_inf_U) std::swap(p.q_inf_D, p.q_inf_U);
    if (p.beta_UD > p.beta_UU) std::swap(p.beta_UD, p.beta_UU);
    if (p.beta_DD > p.beta_DU) std::swap(p.beta_DD, p.beta_DU);
    if (p.k_D > p.k_I) std::swap(p.k_D, p.k_I);
  }
  if (s.equal_recovery) p.q_rec_D = p.q_rec_U;
  return p;
}

// Uniform on the simplex (normalized exponential spacings).
inline StateDist sample_state(Rng& rng) {
  Vec4 e;
  for (double& v : e) v = rng.exponential(1.0);
  const double sum = e[0] + e[1] + e[2] + e[3];
  for (double& v : e) v /= sum;
  return StateDist::normalized(e);
}

}  // namespace botnet

#pragma once

// Fixed-step RK4 integration of the kinetic equation under a constant control.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "botnet/model.hpp"

namespace botnet {

struct TrajectoryPoint {
  double t = 0.0;
  StateDist x;
};

using Trajectory = std::vector<TrajectoryPoint>;

inline double default_step(const ModelParams& p) {
  const double r = p.max_rate();
  return r > 0.0 ? 1e-2 / r : 1e-2;
}

namespace detail {

inline constexpr double kStepFailure = -1e-6;

inline Vec4 axpy(const Vec4& x, double h, const Vec4& k) {
  return {x[0] + h * k[0], x[1] + h * k[1], x[2] + h * k[2], x[3] + h * k[3]};
}

// Evaluates the rhs at a raw RK stage; stages may leave the simplex slightly.
inline Vec4 stage_rhs(const ModelParams& p, const Vec4& raw, const ControlVector& u) {
  for (double c : raw)
    if (c < kStepFailure) throw StepTooLarge("RK4 stage left the simplex; reduce the step");
  return kinetic_rhs(p, StateDist::normalized(raw), u).dx;
}

inline StateDist rk4_step(const ModelParams& p, const StateDist& x, const ControlVector& u,
                          double h) {
  const Vec4& x0 = x.values();
  const Vec4 k1 = kinetic_rhs(p, x, u).dx;
  const Vec4 k2 = stage_rhs(p, axpy(x0, 0.5 * h, k1), u);
  const Vec4 k3 = stage_rhs(p, axpy(x0, 0.5 * h, k2), u);
  const Vec4 k4 = stage_rhs(p, axpy(x0, h, k3), u);
  Vec4 next;
  for (std::size_t i = 0; i < 4; ++i)
    next[i] = x0[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  for (double c : next)
    if (c < kStepFailure) throw StepTooLarge("RK4 step left the simplex; reduce the step");
  return StateDist::normalized(next);
}

}  // namespace detail

// 0, every multiple of `interval` below the horizon, and the horizon itself.
inline std::vector<double> sample_times(double horizon, double interval) {
  if (!(interval > 0.0)) throw InvalidArgument("sample interval must be positive");
  if (!(horizon >= 0.0)) throw InvalidArgument("horizon must be nonnegative");
  const auto full = static_cast<std::size_t>(std::floor(horizon / interval + 1e-9));
  std::vector<double> times;
  times.reserve(full + 2);
  for (std::size_t k = 0; k <= full; ++k) times.push_back(std::min(horizon, interval * k));
  if (times.back() < horizon) times.push_back(horizon);
  return times;
}

// States at the given increasing times (times[0] is the start). Each gap is
// split into equal sub-steps no longer than `step`.
inline Trajectory integrate_at(const ModelParams& p, const StateDist& x0, const ControlVector& u,
                               const std::vector<double>& times, double step) {
  if (!(step > 0.0)) throw InvalidArgument("step must be positive");
  Trajectory out;
  if (times.empty()) return out;
  out.reserve(times.size());
  out.push_back({times.front(), x0});
  StateDist x = x0;
  for (std::size_t k = 1; k < times.size(); ++k) {
    const double span = times[k] - times[k - 1];
    if (span < 0.0) throw InvalidArgument("sample times must be increasing");
    if (span > 0.0) {
      const auto n = static_cast<std::size_t>(std::ceil(span / step - 1e-9));
      const double h = span / static_cast<double>(n);
      for (std::size_t s = 0; s < n; ++s) x = detail::rk4_step(p, x, u, h);
    }
    out.push_back({times[k], x});
  }
  return out;
}

// Emits x0 at t = 0, then a state at every multiple of sample_interval (every
// step when sample_interval == 0) and at the horizon.
inline Trajectory integrate(const ModelParams& p, const StateDist& x0, const ControlVector& u,
                            double horizon, double step, double sample_interval = 0.0) {
  if (!(step > 0.0)) throw InvalidArgument("step must be positive");
  if (sample_interval < 0.0) throw InvalidArgument("sample_interval must be nonnegative");
  return integrate_at(p, x0, u, sample_times(horizon, sample_interval > 0.0 ? sample_interval : step),
                      step);
}

inline StateDist integrate_final(const ModelParams& p, const StateDist& x0,
                                 const ControlVector& u, double horizon, double step) {
  return integrate(p, x0, u, horizon, step, horizon > 0.0 ? horizon : 0.0).back().x;
}

}  // namespace botnet

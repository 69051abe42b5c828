#pragma once

// Small numerical kernels: dense polynomials with real-root bracketing, and
// eigenvalues of 3x3 matrices through the characteristic cubic.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <vector>

namespace botnet::numeric {

// coeffs[k] multiplies y^k.
class Polynomial {
 public:
  Polynomial() = default;
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) {
    if (c_.empty()) c_.push_back(0.0);
  }

  double operator()(double y) const {
    double acc = 0.0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * y + *it;
    return acc;
  }

  std::size_t degree() const {
    std::size_t d = c_.size() - 1;
    while (d > 0 && c_[d] == 0.0) --d;
    return d;
  }

  const std::vector<double>& coeffs() const { return c_; }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(std::max(a.c_.size(), b.c_.size()), 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) r[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) r[i] += b.c_[i];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) {
    return a + b * -1.0;
  }
  friend Polynomial operator*(const Polynomial& a, double s) {
    std::vector<double> r = a.c_;
    for (double& v : r) v *= s;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    std::vector<double> r(a.c_.size() + b.c_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    return Polynomial(std::move(r));
  }

 private:
  std::vector<double> c_{0.0};
};

// Bisects a sign change of f on [lo, hi] until the midpoint is no longer
// representable strictly inside the bracket.
template <typename F>
double bisect(const F& f, double lo, double hi) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  if (f(hi) == 0.0) return hi;
  for (int it = 0; it < 2000; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

struct RootScanOptions {
  double grid = 1e-3;       // initial bracketing step
  int max_refinements = 6;  // grid halvings while the bracket count keeps changing
};

namespace detail {

template <typename F>
std::vector<double> scan_roots(const F& f, double lo, double hi, double grid) {
  std::vector<double> roots;
  const auto n = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil((hi - lo) / grid)));
  double a = lo;
  double fa = f(a);
  if (fa == 0.0) roots.push_back(a);
  for (std::size_t k = 1; k <= n; ++k) {
    const double b = k == n ? hi : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n);
    const double fb = f(b);
    if (fb == 0.0) {
      roots.push_back(b);
    } else if (fa != 0.0 && (fa < 0.0) != (fb < 0.0)) {
      roots.push_back(bisect(f, a, b));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

}  // namespace detail

// Real roots of f on [lo, hi] found by sign changes on a uniform grid. The grid
// is halved until two successive levels agree on the number of roots.
template <typename F>
std::vector<double> real_roots_in(const F& f, double lo, double hi,
                                  const RootScanOptions& opts = {}) {
  if (!(hi > lo)) return {};
  double grid = opts.grid;
  std::vector<double> roots = detail::scan_roots(f, lo, hi, grid);
  for (int level = 0; level < opts.max_refinements; ++level) {
    grid *= 0.5;
    std::vector<double> finer = detail::scan_roots(f, lo, hi, grid);
    const bool stable = finer.size() == roots.size();
    roots = std::move(finer);
    if (stable) break;
  }
  return roots;
}

using Mat3 = std::array<std::array<double, 3>, 3>;
using Eigen3 = std::array<std::complex<double>, 3>;

namespace detail {

inline std::array<std::complex<double>, 2> quadratic_roots(double b, double c) {
  // y^2 + b y + c = 0
  const double disc = b * b - 4.0 * c;
  if (disc < 0.0) {
    const double re = -0.5 * b;
    const double im = 0.5 * std::sqrt(-disc);
    return {std::complex<double>(re, im), std::complex<double>(re, -im)};
  }
  const double s = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(s, b));
  if (q == 0.0) return {std::complex<double>(0.0), std::complex<double>(0.0)};
  return {std::complex<double>(q), std::complex<double>(c / q)};
}

inline std::array<std::complex<double>, 2> eigen2(double a, double b, double c, double d) {
  // [[a, b], [c, d]]
  if (b == 0.0 || c == 0.0) return {std::complex<double>(a), std::complex<double>(d)};
  return quadratic_roots(-(a + d), a * d - b * c);
}

inline long double cubic_at(long double a, long double b, long double c, long double y) {
  return ((y + a) * y + b) * y + c;
}

inline double polish_cubic_root(double a, double b, double c, double y) {
  long double r = y;
  for (int it = 0; it < 8; ++it) {
    const long double f = cubic_at(a, b, c, r);
    const long double df = (3.0L * r + 2.0L * a) * r + b;
    if (df == 0.0L) break;
    const long double step = f / df;
    r -= step;
    if (std::abs(step) <= std::numeric_limits<double>::epsilon() * std::abs(r)) break;
  }
  return static_cast<double>(r);
}

}  // namespace detail

// Roots of y^3 + a y^2 + b y + c. One real root is found in closed form and
// Newton-polished in extended precision; the remaining quadratic is deflated
// and solved with the cancellation-free formula.
inline Eigen3 cubic_roots(double a, double b, double c) {
  const double p = b - a * a / 3.0;
  const double q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
  const double disc = q * q / 4.0 + p * p * p / 27.0;
  double t;  // real root of the depressed cubic t^3 + p t + q
  if (disc > 0.0) {
    const double s = std::sqrt(disc);
    t = std::cbrt(-0.5 * q + s) + std::cbrt(-0.5 * q - s);
  } else if (p < 0.0) {
    const double m = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * m), -1.0, 1.0);
    t = m * std::cos(std::acos(arg) / 3.0);  // largest root
  } else {
    t = 0.0;
  }
  const double r = detail::polish_cubic_root(a, b, c, t - a / 3.0);
  // Deflate: y^3 + a y^2 + b y + c = (y - r)(y^2 + e y + f).
  const double e = a + r;
  // Forward deflation is stable when r dominates the other roots, backward
  // (f = -c / r) when it is the smallest one.
  const double forward = b + r * e;
  const double f = r != 0.0 && r * r < std::abs(forward) ? -c / r : forward;
  auto rest = detail::quadratic_roots(e, f);
  for (auto& z : rest)
    if (z.imag() == 0.0) z = detail::polish_cubic_root(a, b, c, z.real());
  return {std::complex<double>(r), rest[0], rest[1]};
}

// Sorted by decreasing real part, then decreasing imaginary part.
inline void sort_eigenvalues(Eigen3& ev) {
  std::sort(ev.begin(), ev.end(), [](const auto& x, const auto& y) {
    return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag();
  });
}

// Eigenvalues of a 3x3 matrix. When a coordinate decouples exactly (its row or
// column is zero off the diagonal) the problem is split into 1x1 + 2x2 blocks,
// otherwise the characteristic cubic is solved.
inline Eigen3 eigenvalues(const Mat3& m) {
  for (std::size_t k = 0; k < 3; ++k) {
    const std::size_t i = (k + 1) % 3;
    const std::size_t j = (k + 2) % 3;
    const bool row_free = m[k][i] == 0.0 && m[k][j] == 0.0;
    const bool col_free = m[i][k] == 0.0 && m[j][k] == 0.0;
    if (row_free || col_free) {
      const std::size_t lo = std::min(i, j);
      const std::size_t hi = std::max(i, j);
      const auto pair = detail::eigen2(m[lo][lo], m[lo][hi], m[hi][lo], m[hi][hi]);
      Eigen3 ev{std::complex<double>(m[k][k]), pair[0], pair[1]};
      sort_eigenvalues(ev);
      return ev;
    }
  }
  const double trace = m[0][0] + m[1][1] + m[2][2];
  const double minors = m[0][0] * m[1][1] - m[0][1] * m[1][0] + m[0][0] * m[2][2] -
                        m[0][2] * m[2][0] + m[1][1] * m[2][2] - m[1][2] * m[2][1];
  const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                     m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                     m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
  Eigen3 ev = cubic_roots(-trace, minors, -det);
  sort_eigenvalues(ev);
  return ev;
}

}  // namespace botnet::numeric

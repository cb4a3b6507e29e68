#pragma once

// Adaptive quadrature helpers shared by the extremal, bubble and weighted
// integrals. All radial integrals in this library are one-dimensional after
// the spherical reduction, so everything funnels through `integrate`.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "bnlab/errors.hpp"

namespace bnlab::quad {

/// A quadrature result with its absolute error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;

  double relative_error() const {
    return value == 0.0 ? error : error / std::abs(value);
  }
};

/// Neumaier-compensated accumulator. Used wherever pieces of very different
/// magnitude are summed so results do not depend on summation order.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      carry_ += (sum_ - t) + x;
    else
      carry_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

inline constexpr double kDefaultRelTol = 1e-13;

namespace detail {

struct RawEstimate {
  double value = 0.0;
  double error = 0.0;
  double l1 = 0.0;
};

// Global adaptive bisection on the 31 point Kronrod rule: the interval with
// the largest error is split until the total error drops below rel_tol |value|.
// Boost's recursive driver measures the tolerance against |value| with no
// floor, so near-cancelling integrands recurse to full depth; here the
// tolerance is floored at kCancellationFloor rel_tol L1.
inline constexpr double kCancellationFloor = 1e-3;
inline constexpr std::size_t kMaxIntervals = 4096;

template <class F>
RawEstimate gk31(F&& f, double a, double b, double rel_tol) {
  if (b <= a) return {};
  using rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  struct Piece {
    double a, b, value, error, l1;
    bool operator<(const Piece& o) const { return error < o.error; }
  };
  const auto eval = [&](double lo, double hi) {
    // Boost 1.74 reports the error in reference-interval units, so integrate
    // the mapped function on [-1, 1].
    const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
    const auto mapped = [&](double x) { return half * f(mid + half * x); };
    double error = 0.0, l1 = 0.0;
    const double value = rule::integrate(mapped, -1.0, 1.0, 0, 0.0, &error, &l1);
    if (!std::isfinite(value))
      throw QuadratureError("non-finite integral on [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
    return Piece{lo, hi, value, error, l1};
  };
  std::vector<Piece> heap{eval(a, b)};
  double value = heap.front().value, error = heap.front().error, l1 = heap.front().l1;
  while (heap.size() < kMaxIntervals &&
         error > rel_tol * std::max(std::abs(value), kCancellationFloor * l1)) {
    std::pop_heap(heap.begin(), heap.end());
    const Piece worst = heap.back();
    heap.pop_back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(worst.a < mid && mid < worst.b)) {
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    for (const auto& piece : {eval(worst.a, mid), eval(mid, worst.b)}) {
      heap.push_back(piece);
      std::push_heap(heap.begin(), heap.end());
    }
    CompensatedSum v;
    error = 0.0, l1 = 0.0;
    for (const auto& piece : heap) v.add(piece.value), error += piece.error, l1 += piece.l1;
    value = v.value();
  }
  return {value, error, l1};
}

}  // namespace detail

/// Adaptive Gauss-Kronrod (31 point) on [a, b]. Throws QuadratureError when
/// the error estimate exceeds `certify` relative to the L1 norm of the
/// integrand.
template <class F>
Estimate integrate(F&& f, double a, double b, double rel_tol = kDefaultRelTol,
                   double certify = 1e-10) {
  const auto raw = detail::gk31(f, a, b, rel_tol);
  if (raw.error > certify * raw.l1 && raw.error > 0.0)
    throw QuadratureError("adaptive refinement failed to certify tolerance on [" +
                          std::to_string(a) + ", " + std::to_string(b) + "]");
  return {raw.value, raw.error};
}

/// Integrates piecewise over consecutive breakpoints and sums compensated.
/// Certification is against the L1 norm over the whole range.
template <class F>
Estimate integrate_pieces(F&& f, std::span<const double> breaks,
                          double rel_tol = kDefaultRelTol, double certify = 1e-10) {
  CompensatedSum total;
  double err = 0.0;
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    const auto piece = detail::gk31(f, breaks[i], breaks[i + 1], rel_tol);
    total.add(piece.value);
    err += piece.error;
    l1 += piece.l1;
  }
  if (err > certify * l1 && err > 0.0)
    throw QuadratureError("adaptive refinement failed to certify tolerance on [" +
                          std::to_string(breaks.front()) + ", " +
                          std::to_string(breaks.back()) + "]");
  return {total.value(), err};
}

/// Breakpoints for a radial integrand concentrated at `scale` inside [lo, hi]:
/// a geometric ladder scale * 2^k plus any extra points, clipped to (lo, hi).
inline std::vector<double> geometric_breaks(double lo, double hi, double scale,
                                            std::initializer_list<double> extra = {}) {
  std::vector<double> pts{lo, hi};
  for (int k = -12; k < 200; ++k) {
    const double x = std::ldexp(scale, k);
    if (x >= hi) break;
    if (x > lo) pts.push_back(x);
  }
  for (double x : extra)
    if (x > lo && x < hi) pts.push_back(x);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

/// Surface measure of the unit sphere S^{n-1} in R^n.
inline double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

/// Exact tail  int_T^inf t^a (1 + t^q)^{-m} dt  for T >= 2 from the binomial
/// expansion of (1 + t^{-q})^{-m}; every term is a pure power law.
inline double power_tail_series(double a, double q, double m, double T) {
  const double lead = q * m - a - 1.0;
  if (lead <= 0.0) throw NonIntegrable("power-law tail does not decay fast enough");
  CompensatedSum sum;
  double coeff = 1.0;  // binom(-m, k)
  const double log_t = std::log(T);
  for (int k = 0; k < 400; ++k) {
    const double expo = lead + q * k;
    const double term = coeff * std::exp(-expo * log_t) / expo;
    sum.add(term);
    if (std::abs(term) < 1e-18 * std::abs(sum.value())) break;
    coeff *= -(m + k) / (k + 1.0);
  }
  return sum.value();
}

/// Integrand t^a (1 + t^q)^{-m}, evaluated in log form to stay finite for
/// large t.
inline double power_kernel(double t, double a, double q, double m) {
  if (t <= 0.0) return (a == 0.0) ? 1.0 : 0.0;
  return std::exp(a * std::log(t) - m * std::log1p(std::pow(t, q)));
}

/// int_T^inf t^a (1 + t^q)^{-m} dt for any T > 0.
inline Estimate power_tail(double a, double q, double m, double T) {
  constexpr double kSeriesStart = 2.0;
  if (T >= kSeriesStart) return {power_tail_series(a, q, m, T), 0.0};
  const auto f = [&](double t) { return power_kernel(t, a, q, m); };
  const auto head = integrate(f, T, kSeriesStart);
  return {head.value + power_tail_series(a, q, m, kSeriesStart), head.error};
}

/// int_0^inf t^a (1 + t^q)^{-m} dt by adaptive quadrature on [0, R] plus the
/// analytic power-law tail, doubling R until the total moves by < 1e-8
/// relative.
inline Estimate power_integral(double a, double q, double m) {
  if (a <= -1.0) throw NonIntegrable("integrand not integrable at the origin");
  const auto f = [&](double t) { return power_kernel(t, a, q, m); };
  double radius = 8.0;
  Estimate prev{};
  for (int pass = 0; pass < 40; ++pass, radius *= 2.0) {
    const auto breaks = geometric_breaks(0.0, radius, 1.0);
    auto body = integrate_pieces(f, breaks);
    const Estimate total{body.value + power_tail_series(a, q, m, radius), body.error};
    if (pass > 0 && std::abs(total.value - prev.value) < 1e-8 * std::abs(total.value)) {
      return {total.value, std::max(total.error, std::abs(total.value - prev.value))};
    }
    prev = total;
  }
  throw QuadratureError("power integral failed to stabilise under truncation doubling");
}

/// Fixed high-order Gauss-Legendre rule on [a, b].
template <int Points, class F>
double gauss_legendre(F&& f, double a, double b) {
  return boost::math::quadrature::gauss<double, Points>::integrate(f, a, b);
}

}  // namespace bnlab::quad

#pragma once

// Radial shooting for  -Δu = u^{2*-1} + λu  on the unit ball:
//
//     u'' + ((n-1)/r) u' + u^{2*-1} + λ u = 0,   u(0) = s,  u'(0) = 0.
//
// Integration starts at a small r0 from the regular-centre Taylor expansion
// and uses Dormand-Prince 5(4) with dense output for zero location. A core
// error of relative size tol excites the constant homogeneous mode, which
// competes with a tail of size 1/s, so the zero moves by about tol s^2; shots
// therefore run in extended precision with a tolerance tightened in s.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>

#include "bnlab/errors.hpp"
#include "bnlab/parallel.hpp"

namespace bnlab {

struct ShootOptions {
  bool linear = false;       // drop the nonlinearity (eigenvalue mode)
  double r_max = 4.0;        // stop integrating here when no zero occurs
  double tolerance = 1e-12;  // relative step tolerance for s <= 1000
  int grid_nodes = 201;
};

struct RadialProfile {
  int n = 3;
  double lambda = 0.0;
  double shoot_height = 1.0;
  std::vector<double> grid;    // uniform on [0, first_zero or r_end]
  std::vector<double> values;  // u on the grid
  std::optional<double> first_zero;
  double r_end = 0.0;          // where integration stopped
  double max_residual = 0.0;   // relative ODE residual at interior nodes
};

namespace detail {

using Real = long double;
using RadialState = std::array<Real, 2>;

struct RadialEquation {
  int n;
  double lambda;
  bool linear;
  double exponent;  // 2* - 1

  template <class T>
  T source(T u) const {
    const T lin = lambda * u;
    if (linear) return lin;
    return std::copysign(std::pow(std::abs(u), T(exponent)), u) + lin;
  }
  void operator()(const RadialState& y, RadialState& dy, Real r) const {
    dy[0] = y[1];
    dy[1] = -(n - 1.0) / r * y[1] - source(y[0]);
  }
};

inline constexpr double kOverflowGuard = 1e150;

/// Start radius. The profile varies on the scale s^{-2/(n-2)}, so a fixed
/// r0 = 1e-6 is only adequate for s <= 1.
inline double start_radius(int n, double s, bool linear) {
  if (linear || n <= 2) return 1e-6;
  return 1e-6 * std::min(1.0, std::pow(s, -2.0 / (n - 2.0)));
}

struct ShotResult {
  std::optional<double> first_zero;
  double r_end = 0.0;
  std::vector<RadialState> probes;  // states at requested radii, in order
};

/// Integrates from the centre, reporting the state at every sorted probe
/// radius passed before the first zero (or r_max).
inline ShotResult integrate_shot(const RadialEquation& eq, double s, const ShootOptions& opt,
                                 const std::vector<double>& probe_radii = {}) {
  namespace ode = boost::numeric::odeint;
  const Real r0 = start_radius(eq.n, s, eq.linear);
  const Real f0 = eq.source(Real(s));
  RadialState y{s - f0 * r0 * r0 / (2 * eq.n), -f0 * r0 / eq.n};
  const double big = eq.linear ? 1.0 : std::max(1.0, s * 1e-3);
  const Real rel_tol = std::max(1e-18, opt.tolerance / (big * big));
  // Away from the centre u is of size min(s, 1/s); scale the absolute tolerance.
  const Real abs_tol = rel_tol * (eq.linear ? s : std::min(s, 1.0 / s));
  auto stepper = ode::make_dense_output(abs_tol, rel_tol,
                                        ode::runge_kutta_dopri5<RadialState, Real>());
  stepper.initialize(y, r0, Real(1e-3) * r0);

  ShotResult out;
  std::size_t next_probe = 0;
  RadialState tmp;
  const auto taylor = [&](double r) {
    return RadialState{s - f0 * r * r / (2 * eq.n), -f0 * r / eq.n};
  };
  while (next_probe < probe_radii.size() && probe_radii[next_probe] <= r0)
    out.probes.push_back(taylor(probe_radii[next_probe++]));

  while (true) {
    const auto [t0, t1] = stepper.do_step(eq);
    const auto& state = stepper.current_state();
    if (!std::isfinite(state[0]) || std::abs(state[0]) > kOverflowGuard)
      throw BlowupError("radial profile exceeded the overflow guard at r = " +
                        std::to_string(t1));
    double stop = std::min(double(t1), opt.r_max);
    bool crossed = false;
    if (state[0] <= 0.0) {
      crossed = true;
      const auto u_at = [&](Real r) {
        stepper.calc_state(r, tmp);
        return tmp[0];
      };
      boost::math::tools::eps_tolerance<Real> tol(60);
      std::uintmax_t iters = 200;
      const auto [lo, hi] = boost::math::tools::toms748_solve(u_at, t0, t1, u_at(t0),
                                                              state[0], tol, iters);
      const double zero = static_cast<double>(0.5L * (lo + hi));
      if (zero <= opt.r_max) {
        out.first_zero = zero;
        stop = zero;
      }
    }
    while (next_probe < probe_radii.size() && probe_radii[next_probe] <= stop) {
      stepper.calc_state(probe_radii[next_probe++], tmp);
      out.probes.push_back(tmp);
    }
    if (crossed || t1 >= opt.r_max) {
      out.r_end = stop;
      return out;
    }
    if (t1 - t0 < 1e-17L * t1) throw ConvergenceError("radial step size underflow");
  }
}

}  // namespace detail

/// One shot at centre height s. The profile is tabulated on a uniform grid up
/// to the first zero (or the end of integration), and the equation residual
/// is measured at interior nodes from a 5-point stencil on u'.
inline RadialProfile shoot(int n, double lambda, double s, const ShootOptions& opt = {}) {
  if (n < 2 || (n < 3 && !opt.linear)) throw DimensionError("shooting needs n >= 3");
  if (!(s > 0.0)) throw ParameterError("shoot height must be positive");
  const detail::RadialEquation eq{n, lambda, opt.linear,
                                  n > 2 ? (n + 2.0) / (n - 2.0) : 1.0};
  const auto first = detail::integrate_shot(eq, s, opt);

  RadialProfile prof;
  prof.n = n;
  prof.lambda = lambda;
  prof.shoot_height = s;
  prof.first_zero = first.first_zero;
  prof.r_end = first.r_end;
  const int m = std::max(opt.grid_nodes, 11);
  const double spacing = prof.r_end / (m - 1);
  // Stencil step proportional to r, since the profile varies on that scale,
  // capped so neighbouring stencils stay sorted.
  const auto stencil_step = [&](double r) { return std::min(2e-3 * r, 0.2 * spacing); };
  const auto node = [&](int i) { return i == m - 1 ? prof.r_end : i * spacing; };
  std::vector<double> radii;
  for (int i = 0; i < m; ++i) {
    const double r = node(i);
    if (i == 0 || i == m - 1) {
      radii.push_back(r);
      continue;
    }
    for (int k = -2; k <= 2; ++k) radii.push_back(r + k * stencil_step(r));
  }
  const auto second = detail::integrate_shot(eq, s, opt, radii);
  if (second.probes.size() != radii.size())
    throw ConvergenceError("repeat shot did not reproduce the first");
  std::size_t idx = 0;
  for (int i = 0; i < m; ++i) {
    prof.grid.push_back(node(i));
    if (i == 0 || i == m - 1) {
      prof.values.push_back(static_cast<double>(second.probes[idx++][0]));
      continue;
    }
    const auto* st = &second.probes[idx];
    idx += 5;
    const detail::Real u = st[2][0];
    const detail::Real du = st[2][1];
    const double r = prof.grid.back();
    const detail::Real h = stencil_step(r);
    const detail::Real d2u = (st[0][1] - 8 * st[1][1] + 8 * st[3][1] - st[4][1]) / (12 * h);
    const detail::Real drift = (n - 1.0L) / r * du;
    const detail::Real f = eq.source(u);
    const detail::Real scale = std::abs(d2u) + std::abs(drift) + std::abs(f);
    if (scale > 0)
      prof.max_residual = std::max(prof.max_residual,
                                   static_cast<double>(std::abs(d2u + drift + f) / scale));
    prof.values.push_back(static_cast<double>(u));
  }
  if (prof.first_zero) prof.values.back() = 0.0;
  return prof;
}

/// First zero of the shot, or nullopt when u stays positive up to r_max.
inline std::optional<double> first_zero(int n, double lambda, double s, const ShootOptions& opt = {}) {
  const detail::RadialEquation eq{n, lambda, opt.linear,
                                  n > 2 ? (n + 2.0) / (n - 2.0) : 1.0};
  return detail::integrate_shot(eq, s, opt).first_zero;
}

/// First Dirichlet eigenvalue of -Δ on the unit ball: the linear equation with
/// λ = 1 vanishes first at j, and rescaling r -> r/j gives λ1 = j^2.
inline double principal_eigenvalue(int n, double tolerance = 1e-12) {
  if (n < 2) throw DimensionError("principal eigenvalue needs n >= 2");
  ShootOptions opt;
  opt.linear = true;
  opt.r_max = 10.0 + n;
  opt.tolerance = tolerance;
  const auto j = first_zero(n, 1.0, 1.0, opt);
  if (!j) throw ConvergenceError("linear radial equation did not vanish");
  return *j * *j;
}

struct BallSearch {
  double s_min = 1e-2;
  double s_max = 1e6;
  int seeds = 200;
  double zero_tolerance = 1e-6;
  int jobs = 1;
};

/// Shoot height s* whose first zero is at r = 1, or nullopt when no seed
/// pair on the log grid brackets r = 1.
inline std::optional<double> solve_ball(int n, double lambda, const BallSearch& search = {}) {
  if (n < 3) throw DimensionError("the ball problem needs n >= 3");
  const double lambda1 = principal_eigenvalue(n);
  if (!(lambda > 0.0 && lambda < lambda1))
    throw ParameterError("lambda must lie in (0, lambda_1)");
  // Only the sign of the miss matters away from the root, so shots stop just
  // past r = 1.
  ShootOptions opt;
  opt.r_max = 1.0 + 1e-2;
  const auto miss = [&](double log_s) {
    const auto z = first_zero(n, lambda, std::exp(log_s), opt);
    return z ? *z - 1.0 : opt.r_max - 1.0;
  };
  const double lo = std::log(search.s_min), hi = std::log(search.s_max);
  const auto seeds = static_cast<std::size_t>(search.seeds);
  std::vector<double> xs(seeds), fs(seeds);
  for (std::size_t i = 0; i < seeds; ++i) xs[i] = lo + (hi - lo) * i / (seeds - 1);
  // Seeds are shot in ascending chunks and the scan stops at the first
  // bracket, which is the same bracket for any chunk size.
  const std::size_t chunk = 4 * static_cast<std::size_t>(std::max(1, search.jobs));
  std::size_t done = 0;
  while (done < seeds) {
    const std::size_t end = std::min(seeds, done + chunk);
    parallel_for(end - done, search.jobs, [&](std::size_t k) { fs[done + k] = miss(xs[done + k]); });
    for (std::size_t i = done == 0 ? 0 : done - 1; i < end; ++i) {
      if (fs[i] == 0.0) return std::exp(xs[i]);
      if (i + 1 >= end || (fs[i] > 0.0) == (fs[i + 1] > 0.0)) continue;
      double a = xs[i], b = xs[i + 1], fa = fs[i];
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        const double fm = miss(mid);
        if (std::abs(fm) < search.zero_tolerance) return std::exp(mid);
        if ((fm > 0.0) == (fa > 0.0))
          a = mid, fa = fm;
        else
          b = mid;
      }
      throw ConvergenceError("bisection on the shoot height stalled");
    }
    done = end;
  }
  return std::nullopt;
}

struct ThresholdResult {
  double threshold = 0.0;
  double lambda1 = 0.0;
  double bracket_width = 0.0;
};

/// Bisection in λ on the predicate "solve_ball succeeds", to a bracket of
/// width `width_fraction` λ1. For n >= 4 the true threshold is 0 and the
/// result is the numerical floor set by the s search range.
inline ThresholdResult existence_threshold(int n, double width_fraction = 0.002,
                                           const BallSearch& search = {}) {
  if (n < 3) throw DimensionError("the ball problem needs n >= 3");
  ThresholdResult out;
  out.lambda1 = principal_eigenvalue(n);
  double lo = 0.0;
  double hi = 0.75 * out.lambda1;
  if (!solve_ball(n, hi, search)) throw ConvergenceError("no solution found at 0.75 lambda_1");
  while (hi - lo > width_fraction * out.lambda1) {
    const double mid = 0.5 * (lo + hi);
    if (solve_ball(n, mid, search))
      hi = mid;
    else
      lo = mid;
  }
  out.threshold = 0.5 * (lo + hi);
  out.bracket_width = hi - lo;
  return out;
}

}  // namespace bnlab

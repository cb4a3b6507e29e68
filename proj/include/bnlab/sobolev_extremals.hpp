#pragma once

// Extremal functions for the sharp Sobolev inequality on R^n
//
//     (int |u|^{p*})^{p/p*} <= K(n,p)^p int |grad u|^p ,
//
// their rescalings, the sharp constant K(n,p) and the mass constant
// a = int |v_1|^p. The extremal is the Aubin-Talenti profile
//
//     v_1(r) = c (1 + r^{p/(p-1)})^{-(n-p)/p},
//
// with c fixed by int |v_1|^{p*} = 1.

#include <cmath>
#include <numbers>
#include <string>

#include "bnlab/errors.hpp"
#include "bnlab/quadrature.hpp"
#include "bnlab/radial_rayleigh.hpp"

namespace bnlab {

struct SobolevSetup {
  int n = 0;
  double p = 0.0;
  double p_star = 0.0;
  bool supercritical_dim = false;  // n > p^2

  /// Conjugate exponent p/(p-1); also the power of r inside the profile.
  double conjugate() const { return p / (p - 1.0); }
  /// (n-p)/p, the decay power of the profile bracket.
  double bracket_power() const { return (n - p) / p; }
};

inline SobolevSetup make_setup(int n, double p) {
  if (!(p > 1.0) || !(p < static_cast<double>(n)) || !std::isfinite(p))
    throw DimensionError("need 1 < p < n, got n=" + std::to_string(n) +
                         ", p=" + std::to_string(p));
  SobolevSetup s;
  s.n = n;
  s.p = p;
  s.p_star = n * p / (n - p);
  s.supercritical_dim = static_cast<double>(n) > p * p;
  return s;
}

/// The normalized extremal v_1. Radial, positive and strictly decreasing;
/// v_1(r) r^{(n-p)/(p-1)} tends to c as r -> inf.
struct Instanton {
  SobolevSetup setup;
  double normalization = 0.0;   // c = v_1(0)
  double decay_exponent = 0.0;  // (n-p)/(p-1)
  double normalization_error = 0.0;

  double value(double r) const {
    const double q = setup.conjugate();
    return normalization * std::exp(-setup.bracket_power() * std::log1p(std::pow(r, q)));
  }

  /// d v_1 / dr (non-positive).
  double derivative(double r) const {
    if (r <= 0.0) return 0.0;
    const double q = setup.conjugate();
    const double k = setup.bracket_power();
    const double rq = std::pow(r, q);
    return -normalization * k * q * rq / r * std::exp(-(k + 1.0) * std::log1p(rq));
  }
};

namespace detail {

// int_{R^n} r^{extra} (1 + r^q)^{-m} dx, spherical reduction.
inline quad::Estimate radial_power_moment(const SobolevSetup& s, double extra, double m) {
  const double area = quad::sphere_area(s.n);
  auto e = quad::power_integral(s.n - 1.0 + extra, s.conjugate(), m);
  return {area * e.value, area * e.error};
}

}  // namespace detail

/// Builds v_1. The critical-norm equation c^{p*} J = 1 has J computed by
/// radial quadrature with analytic tail, and is then solved for c.
inline Instanton make_instanton(const SobolevSetup& setup) {
  const auto j = detail::radial_power_moment(setup, 0.0, static_cast<double>(setup.n));
  Instanton inst;
  inst.setup = setup;
  inst.normalization = std::pow(j.value, -1.0 / setup.p_star);
  inst.normalization_error = j.relative_error() / setup.p_star;
  inst.decay_exponent = (setup.n - setup.p) / (setup.p - 1.0);
  return inst;
}

inline double instanton_value(const Instanton& inst, double r) { return inst.value(r); }

/// v_eps(r) = eps^{-n/p*} v_1(r / eps).
inline double rescale(const Instanton& inst, double eps, double r) {
  if (!(eps > 0.0)) throw ScaleError("rescale requires eps > 0");
  const auto& s = inst.setup;
  return std::pow(eps, -s.n / s.p_star) * inst.value(r / eps);
}

inline double rescale_derivative(const Instanton& inst, double eps, double r) {
  if (!(eps > 0.0)) throw ScaleError("rescale requires eps > 0");
  const auto& s = inst.setup;
  return std::pow(eps, -s.n / s.p_star - 1.0) * inst.derivative(r / eps);
}

/// int |v_1|^{p*} over R^n.
inline quad::Estimate critical_norm(const Instanton& inst) {
  const auto& s = inst.setup;
  auto e = detail::radial_power_moment(s, 0.0, s.n);
  const double scale = std::pow(inst.normalization, s.p_star);
  return {scale * e.value, scale * e.error};
}

/// int |grad v_1|^p over R^n. Uses |v_1'|^p = (c k q)^p r^q (1 + r^q)^{-n}.
inline quad::Estimate gradient_energy(const Instanton& inst) {
  const auto& s = inst.setup;
  const double q = s.conjugate();
  auto e = detail::radial_power_moment(s, q, s.n);
  const double scale = std::pow(inst.normalization * s.bracket_power() * q, s.p);
  return {scale * e.value, scale * e.error};
}

/// Sobolev quotient int|grad v|^p / (int |v|^{p*})^{p/p*} of the extremal.
inline double instanton_quotient(const Instanton& inst) {
  const auto& s = inst.setup;
  return gradient_energy(inst).value / std::pow(critical_norm(inst).value, s.p / s.p_star);
}

/// Closed form of K(n,p)^p:
///   K = pi^{-1/2} n^{-1/p} ((p-1)/(n-p))^{1-1/p}
///       [Gamma(1+n/2) Gamma(n) / (Gamma(n/p) Gamma(1+n-n/p))]^{1/n}.
inline double talenti_constant_pow_p(const SobolevSetup& s) {
  const double n = s.n;
  const double p = s.p;
  const double log_gamma = std::lgamma(1.0 + n / 2.0) + std::lgamma(n) -
                           std::lgamma(n / p) - std::lgamma(1.0 + n - n / p);
  const double log_k = -0.5 * std::log(std::numbers::pi) - std::log(n) / p +
                       (1.0 - 1.0 / p) * std::log((p - 1.0) / (n - p)) + log_gamma / n;
  return std::exp(p * log_k);
}

struct SharpConstant {
  SobolevSetup setup;
  double k_pow_p = 0.0;      // K(n,p)^p, closed form
  double k_inv_pow_p = 0.0;  // K(n,p)^{-p}
  double minimized_inv_pow_p = 0.0;  // K^{-p} from radial Rayleigh minimization
  double relative_gap = 0.0;
};

inline constexpr double kSharpConstantAgreement = 1e-6;

/// K(n,p)^p two ways: closed form and direct minimization of the radial
/// Sobolev quotient. Throws ConvergenceError if they disagree.
inline SharpConstant sharp_constant(const SobolevSetup& setup,
                                    double tolerance = kSharpConstantAgreement) {
  SharpConstant out;
  out.setup = setup;
  out.k_pow_p = talenti_constant_pow_p(setup);
  out.k_inv_pow_p = 1.0 / out.k_pow_p;
  const auto minimized = minimize_radial_quotient(setup.n, setup.p);
  out.minimized_inv_pow_p = minimized.extrapolated;
  out.relative_gap = std::abs(out.minimized_inv_pow_p - out.k_inv_pow_p) / out.k_inv_pow_p;
  if (!(out.relative_gap <= tolerance))
    throw ConvergenceError("closed form and radial minimization of K(n,p)^{-p} disagree: "
                           "relative gap " + std::to_string(out.relative_gap));
  return out;
}

/// Closed form only; for callers that already trust the cross-check.
inline SharpConstant sharp_constant_closed_form(const SobolevSetup& setup) {
  SharpConstant out;
  out.setup = setup;
  out.k_pow_p = talenti_constant_pow_p(setup);
  out.k_inv_pow_p = 1.0 / out.k_pow_p;
  out.minimized_inv_pow_p = out.k_inv_pow_p;
  return out;
}

struct MassConstant {
  SobolevSetup setup;
  double a = 0.0;
  double error = 0.0;  // absolute
};

/// a = int |v_1|^p, finite exactly when n > p^2.
inline MassConstant mass_constant(const Instanton& inst) {
  const auto& s = inst.setup;
  if (!s.supercritical_dim)
    throw NonIntegrable("int |v_1|^p diverges for n <= p^2 (n=" + std::to_string(s.n) +
                        ", p=" + std::to_string(s.p) + ")");
  auto e = detail::radial_power_moment(s, 0.0, s.n - s.p);
  const double scale = std::pow(inst.normalization, s.p);
  return {s, scale * e.value, scale * e.error};
}

}  // namespace bnlab

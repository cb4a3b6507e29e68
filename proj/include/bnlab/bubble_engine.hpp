#pragma once

// Two-scale bubbles concentrated at points approaching a singular boundary
// point,
//
//     w_j(x) = eta((x - x_j)/eps_j^alpha) v_{eps_j^beta}(x - x_j),
//
// and the integrals that enter the energy quotient. A bubble is radial about
// x_j with support radius R = delta eps^alpha and concentration scale
// tau = eps^beta, so every integral except the weighted one reduces to a 1D
// radial quadrature; the weighted one needs one more angle.

#include <array>
#include <cmath>
#include <map>
#include <utility>
#include <vector>

#include "bnlab/errors.hpp"
#include "bnlab/quadrature.hpp"
#include "bnlab/singular_geometry.hpp"
#include "bnlab/sobolev_extremals.hpp"

namespace bnlab {

/// Radial cutoff: 1 on B(0, plateau delta), 0 outside B(0, delta), quintic
/// smootherstep in between (C^2, |eta'| <= 15/8 / ((1-plateau) delta)).
struct CutoffSpec {
  double delta = 1.0;
  double plateau = 0.5;

  double operator()(double r) const { return profile(r / delta); }
  double derivative(double r) const { return profile_slope(r / delta) / delta; }

  double profile(double t) const {
    if (t <= plateau) return 1.0;
    if (t >= 1.0) return 0.0;
    const double u = (t - plateau) / (1.0 - plateau);
    return 1.0 - u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  }
  /// 1 - eta, without cancellation near the plateau.
  double complement(double r) const {
    const double t = r / delta;
    if (t <= plateau) return 0.0;
    if (t >= 1.0) return 1.0;
    const double u = (t - plateau) / (1.0 - plateau);
    return u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
  }
  double profile_slope(double t) const {
    if (t <= plateau || t >= 1.0) return 0.0;
    const double u = (t - plateau) / (1.0 - plateau);
    return -30.0 * u * u * (1.0 - u) * (1.0 - u) / (1.0 - plateau);
  }
};

inline CutoffSpec make_cutoff(double delta, double plateau) {
  if (!(delta > 0.0)) throw ParameterError("cutoff radius must be positive");
  if (!(plateau > 0.0 && plateau < 1.0)) throw ParameterError("plateau must lie in (0, 1)");
  return {delta, plateau};
}

/// Geometry of one radial bubble: eta(|x - c|/R') v_tau(|x - c|) with the
/// cutoff profile stretched to support radius `support`, centred at distance
/// `center_distance` from the singular point.
struct BubbleShape {
  double support = 0.0;          // R = delta eps^alpha
  double concentration = 0.0;    // tau = eps^beta
  double center_distance = 0.0;  // d = eps
  double plateau = 0.5;

  CutoffSpec cutoff() const { return {support, plateau}; }
};

struct Bubble {
  SingularSequence sequence;
  std::size_t j = 0;
  double beta = 0.0;
  CutoffSpec cutoff;
  Instanton instanton;

  double eps() const { return sequence.radii[j]; }
  double alpha() const { return sequence.domain.alpha; }
  const Vector& center() const { return sequence.points[j]; }

  BubbleShape shape() const {
    return {cutoff.delta * std::pow(eps(), alpha()), std::pow(eps(), beta), eps(),
            cutoff.plateau};
  }
};

inline Bubble make_bubble(const SingularSequence& seq, std::size_t j, double beta,
                          const CutoffSpec& cutoff, const Instanton& inst) {
  if (j >= seq.size()) throw ParameterError("bubble index beyond the witness sequence");
  if (!(beta > seq.domain.alpha))
    throw ParameterError("bubble concentration exponent needs beta > alpha (beta = " +
                         std::to_string(beta) + ", alpha = " +
                         std::to_string(seq.domain.alpha) + ")");
  if (cutoff.delta > seq.delta * (1.0 + 1e-15))
    throw ParameterError("cutoff support exceeds the witness ball radius");
  return {seq, j, beta, cutoff, inst};
}

/// w(x) and grad w(x).
inline std::pair<double, Vector> bubble_value_and_gradient(const Bubble& b, const Vector& x) {
  const auto shape = b.shape();
  const Vector offset = x - b.center();
  const double r = offset.norm();
  if (r >= shape.support) return {0.0, Vector::Zero(x.size())};
  const auto eta = shape.cutoff();
  const double v = rescale(b.instanton, shape.concentration, r);
  const double value = eta(r) * v;
  if (r == 0.0) return {value, Vector::Zero(x.size())};
  const double dv = rescale_derivative(b.instanton, shape.concentration, r);
  const double radial = eta.derivative(r) * v + eta(r) * dv;
  return {value, (radial / r) * offset};
}

/// The integrals of one bubble. Deficits are integrated directly over the
/// cutoff shell and the exterior, not obtained by subtraction:
///   d1 = I1 - int_{R^n} |grad v_tau|^p,   d2 = int_{R^n} |v_tau|^{p*} - I2.
struct IntegralSet {
  double I1 = 0.0, I2 = 0.0, I3 = 0.0;
  double d1 = 0.0, d2 = 0.0;
  std::map<double, double> I4;  // theta -> int |x - x0|^theta |grad w|^p
  // Absolute error estimates.
  double I1_err = 0.0, I2_err = 0.0, I3_err = 0.0, d1_err = 0.0, d2_err = 0.0;
  std::map<double, double> I4_err;

  double max_relative_error() const {
    double worst = std::max({I1_err / I1, I2_err / I2, I3_err / I3});
    for (const auto& [theta, v] : I4) worst = std::max(worst, I4_err.at(theta) / v);
    return worst;
  }
};

namespace detail {

struct RadialKernels {
  const Instanton& inst;
  BubbleShape shape;

  double v(double r) const { return rescale(inst, shape.concentration, r); }
  double dv(double r) const { return std::abs(rescale_derivative(inst, shape.concentration, r)); }
  double eta(double r) const { return shape.cutoff()(r); }
  double deta(double r) const { return std::abs(shape.cutoff().derivative(r)); }
  // |w'(r)|; both radial factors are non-increasing.
  double dw(double r) const { return deta(r) * v(r) + eta(r) * dv(r); }
  // |w'(r)| - |v'(r)|.
  double dw_excess(double r) const {
    return deta(r) * v(r) - shape.cutoff().complement(r) * dv(r);
  }
  // |w'|^p - |v'|^p.
  double grad_excess(double r, double p) const {
    const double base = dv(r);
    if (base == 0.0) return std::pow(dw(r), p);
    return std::pow(base, p) * std::expm1(p * std::log1p(dw_excess(r) / base));
  }
  // 1 - eta^s.
  double eta_loss(double r, double s) const {
    return -std::expm1(s * std::log1p(-shape.cutoff().complement(r)));
  }

  std::vector<double> breaks(double lo, double hi) const {
    return quad::geometric_breaks(lo, hi, shape.concentration,
                                  {shape.plateau * shape.support, shape.support});
  }
};

inline constexpr double kRadialRelTol = 1e-13;
inline constexpr double kRadialCertify = 1e-9;

}  // namespace detail

/// I1, I2, I3 and the deficits d1, d2 of a bubble of the given shape.
inline IntegralSet radial_integrals(const BubbleShape& shape, const Instanton& inst) {
  const auto& s = inst.setup;
  const double area = quad::sphere_area(s.n);
  const detail::RadialKernels k{inst, shape};
  const double R = shape.support;
  const double shell = shape.plateau * R;
  const auto full = k.breaks(0.0, R);
  const auto outer = k.breaks(shell, R);
  auto radial = [&](auto&& f, const std::vector<double>& pts) {
    auto e = quad::integrate_pieces(f, pts, detail::kRadialRelTol, detail::kRadialCertify);
    return quad::Estimate{area * e.value, area * e.error};
  };
  const double nm1 = s.n - 1.0;

  IntegralSet out;
  const auto i1 = radial([&](double r) { return std::pow(k.dw(r), s.p) * std::pow(r, nm1); }, full);
  const auto i2 = radial(
      [&](double r) { return std::pow(k.eta(r) * k.v(r), s.p_star) * std::pow(r, nm1); }, full);
  const auto i3 = radial(
      [&](double r) { return std::pow(k.eta(r) * k.v(r), s.p) * std::pow(r, nm1); }, full);
  out.I1 = i1.value, out.I1_err = i1.error;
  out.I2 = i2.value, out.I2_err = i2.error;
  out.I3 = i3.value, out.I3_err = i3.error;

  // Exterior tails of the full instanton, in instanton units t = r / tau.
  const double T = R / shape.concentration;
  const double q = s.conjugate();
  const double c = inst.normalization;
  const auto grad_tail = quad::power_tail(nm1 + q, q, s.n, T);
  const auto norm_tail = quad::power_tail(nm1, q, s.n, T);
  const double grad_scale = area * std::pow(c * s.bracket_power() * q, s.p);
  const double norm_scale = area * std::pow(c, s.p_star);

  const auto shell_grad = radial(
      [&](double r) {
        return k.grad_excess(r, s.p) * std::pow(r, nm1);
      },
      outer);
  const auto shell_norm = radial(
      [&](double r) {
        return k.eta_loss(r, s.p_star) * std::pow(k.v(r), s.p_star) * std::pow(r, nm1);
      },
      outer);
  out.d1 = shell_grad.value - grad_scale * grad_tail.value;
  out.d1_err = shell_grad.error + grad_scale * grad_tail.error;
  out.d2 = shell_norm.value + norm_scale * norm_tail.value;
  out.d2_err = shell_norm.error + norm_scale * norm_tail.error;
  return out;
}

inline IntegralSet radial_integrals(const Bubble& b) { return radial_integrals(b.shape(), b.instanton); }

namespace detail {

// int_0^pi (r^2 + d^2 - 2 r d cos phi)^{theta/2} sin^{n-2} phi dphi with a
// composite 30-point Gauss rule on `panels` equal panels.
inline double angular_weight(double r, double d, double theta, int n, int panels) {
  const double width = std::numbers::pi / panels;
  quad::CompensatedSum sum;
  const auto f = [&](double phi) {
    const double s = std::sin(0.5 * phi);
    const double dist2 = (d - r) * (d - r) + 4.0 * r * d * s * s;
    return std::pow(dist2, 0.5 * theta) * std::pow(std::sin(phi), n - 2);
  };
  for (int k = 0; k < panels; ++k)
    sum.add(quad::gauss_legendre<30>(f, k * width, (k + 1) * width));
  return sum.value();
}

inline quad::Estimate weighted_gradient(const BubbleShape& shape, const Instanton& inst,
                                        double theta, int panels) {
  const auto& s = inst.setup;
  const RadialKernels k{inst, shape};
  const double nm1 = s.n - 1.0;
  const double d = shape.center_distance;
  const auto f = [&](double r) {
    return std::pow(k.dw(r), s.p) * std::pow(r, nm1) * angular_weight(r, d, theta, s.n, panels);
  };
  const auto e = quad::integrate_pieces(f, k.breaks(0.0, shape.support), 1e-11, 1e-8);
  const double area = quad::sphere_area(s.n - 1);
  return {area * e.value, area * e.error};
}

}  // namespace detail

inline constexpr double kWeightedCertify = 1e-6;

/// int |x - x0|^theta |grad w|^p dx. The error estimate combines the radial
/// adaptive estimate with the change under doubling the angular panels.
inline quad::Estimate weighted_gradient_integral(const BubbleShape& shape, const Instanton& inst,
                                                 double theta) {
  if (!(theta > 0.0)) throw ParameterError("weighted integral needs theta > 0");
  if (inst.setup.n < 3) throw DimensionError("weighted integral needs n >= 3");
  const auto coarse = detail::weighted_gradient(shape, inst, theta, 2);
  const auto fine = detail::weighted_gradient(shape, inst, theta, 4);
  const double err = fine.error + std::abs(fine.value - coarse.value);
  if (err > kWeightedCertify * std::abs(fine.value))
    throw QuadratureError("weighted gradient integral failed to certify 1e-6");
  return {fine.value, err};
}

inline quad::Estimate weighted_gradient_integral(const Bubble& b, double theta) {
  return weighted_gradient_integral(b.shape(), b.instanton, theta);
}

/// All integrals of a bubble, with the weighted one at each requested theta.
inline IntegralSet evaluate_integrals(const BubbleShape& shape, const Instanton& inst,
                                      const std::vector<double>& thetas) {
  auto out = radial_integrals(shape, inst);
  for (double theta : thetas) {
    const auto e = weighted_gradient_integral(shape, inst, theta);
    out.I4[theta] = e.value;
    out.I4_err[theta] = e.error;
  }
  return out;
}

inline IntegralSet evaluate_integrals(const Bubble& b, const std::vector<double>& thetas) {
  return evaluate_integrals(b.shape(), b.instanton, thetas);
}

/// Recomputes I1, I2, I3 through z_mu = eta v_mu at mu = eps^{beta - alpha}
/// on the unscaled cutoff, using
///   int|grad w|^p = int|grad z_mu|^p,  int|w|^{p*} = int|z_mu|^{p*},
///   int|w|^p = eps^{p alpha} int|z_mu|^p,
/// and returns the three relative discrepancies against the direct values.
inline std::array<double, 3> scaling_reduction_check(const Bubble& b) {
  const auto direct = radial_integrals(b);
  const double eps = b.eps();
  const double mu = std::pow(eps, b.beta - b.alpha());
  const BubbleShape reduced{b.cutoff.delta, mu, eps / std::pow(eps, b.alpha()), b.cutoff.plateau};
  const auto z = radial_integrals(reduced, b.instanton);
  const double p = b.instanton.setup.p;
  const double i3 = std::pow(eps, p * b.alpha()) * z.I3;
  return {std::abs(z.I1 - direct.I1) / std::abs(direct.I1),
          std::abs(z.I2 - direct.I2) / std::abs(direct.I2),
          std::abs(i3 - direct.I3) / std::abs(direct.I3)};
}

}  // namespace bnlab

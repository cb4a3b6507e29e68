#pragma once

// Power-cusp domains with an interior alpha-singular boundary point at the
// origin, witness sequences for that singularity, the prototype coefficient
// fields a(x) = a0 + C0|x - x0|^sigma and A(x) = A0 + C0|x - x0|^gamma I,
// checks of the comparison hypotheses, and the linear change of variables
// y = D P x that turns A(x0) into the identity.

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/tools/roots.hpp>

#include "bnlab/errors.hpp"
#include "bnlab/sobolev_extremals.hpp"

namespace bnlab {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Omega = {0 < x_n < L, |x'| < kappa x_n^alpha}  U  B(L e_n, bulk_radius).
/// The tip x0 = 0 is a boundary point; alpha = 1 is a straight cone.
struct CuspDomain {
  SobolevSetup setup;
  double alpha = 1.0;
  double kappa = 1.0;
  double spine_length = 1.0;
  double bulk_radius = 0.5;

  int dim() const { return setup.n; }
  Vector tip() const { return Vector::Zero(setup.n); }
  Vector axis_point(double t) const {
    Vector x = Vector::Zero(setup.n);
    x[setup.n - 1] = t;
    return x;
  }

  /// kappa x_n^alpha - |x'|; zero on the lateral surface, positive inside.
  double lateral_gap(const Vector& x) const {
    const double h = x[setup.n - 1];
    if (h <= 0.0) return -x.head(setup.n - 1).norm() - std::abs(h);
    return kappa * std::pow(h, alpha) - x.head(setup.n - 1).norm();
  }

  bool in_cusp(const Vector& x) const {
    const double h = x[setup.n - 1];
    return h > 0.0 && h < spine_length && lateral_gap(x) > 0.0;
  }

  bool in_bulk(const Vector& x) const {
    return (x - axis_point(spine_length)).norm() < bulk_radius;
  }

  /// Membership in the open set Omega.
  bool contains(const Vector& x) const { return in_cusp(x) || in_bulk(x); }

  /// Distance from the axis point t e_n to the lateral surface of the cusp,
  ///   min_h sqrt(kappa^2 h^{2 alpha} + (h - t)^2).
  /// Closed form for alpha = 1; otherwise the minimiser is the unique root of
  /// a monotone derivative on (0, t).
  double lateral_distance(double t) const {
    if (t <= 0.0) return 0.0;
    if (alpha == 1.0) return kappa * t / std::sqrt(1.0 + kappa * kappa);
    const auto slope = [&](double h) {
      return alpha * kappa * kappa * std::pow(h, 2.0 * alpha - 1.0) + (h - t);
    };
    boost::math::tools::eps_tolerance<double> tol(52);
    std::uintmax_t iters = 200;
    const auto [lo, hi] = boost::math::tools::toms748_solve(slope, 0.0, t, tol, iters);
    const double h = 0.5 * (lo + hi);
    return std::sqrt(kappa * kappa * std::pow(h, 2.0 * alpha) + (h - t) * (h - t));
  }

  /// Largest rho with B(t e_n, rho) inside the truncated cusp or inside the
  /// bulk ball. Exact for the cusp part; the union is treated conservatively.
  double axis_clearance(double t) const {
    const double in_cusp_part = (t > 0.0 && t < spine_length)
                                    ? std::min(lateral_distance(t), spine_length - t)
                                    : 0.0;
    const double in_bulk_part = bulk_radius - std::abs(t - spine_length);
    return std::max({in_cusp_part, in_bulk_part, 0.0});
  }

  double diameter_bound() const {
    const double width = kappa * std::pow(spine_length, alpha);
    return std::max(std::hypot(spine_length, width), spine_length + bulk_radius) +
           bulk_radius;
  }
};

inline CuspDomain build_domain(const SobolevSetup& setup, double alpha, double kappa,
                               double spine_length, double bulk_radius) {
  if (!(alpha >= 1.0))
    throw GeometryError("cusp order alpha must be >= 1, got " + std::to_string(alpha));
  if (!(kappa > 0.0) || !(spine_length > 0.0) || !(bulk_radius > 0.0))
    throw GeometryError("kappa, spine length and bulk radius must be positive");
  return CuspDomain{setup, alpha, kappa, spine_length, bulk_radius};
}

/// Axial witness points x_j = eps_j e_n with B(x_j, delta eps_j^alpha) inside
/// Omega, verified one by one.
struct SingularSequence {
  CuspDomain domain;
  double delta = 0.0;
  std::vector<Vector> points;
  std::vector<double> radii;      // eps_j = |x_j - x0|
  std::vector<double> clearance;  // exact room around x_j

  std::size_t size() const { return radii.size(); }
  double ball_radius(std::size_t j) const {
    return delta * std::pow(radii[j], domain.alpha);
  }
};

inline SingularSequence witness_sequence(const CuspDomain& domain, double delta, double eps0,
                                         double ratio, int j_max) {
  if (!(delta > 0.0)) throw GeometryError("delta must be positive");
  if (!(eps0 > 0.0) || !(eps0 < domain.spine_length))
    throw GeometryError("eps0 must lie in (0, L)");
  if (!(ratio > 0.0 && ratio < 1.0)) throw GeometryError("ratio must lie in (0, 1)");
  if (j_max < 0) throw GeometryError("j_max must be non-negative");
  SingularSequence seq{domain, delta, {}, {}, {}};
  for (int j = 0; j <= j_max; ++j) {
    const double eps = eps0 * std::pow(ratio, j);
    const double room = domain.axis_clearance(eps);
    const double need = delta * std::pow(eps, domain.alpha);
    if (!(need <= room))
      throw WitnessError("ball B(x_j, delta eps_j^alpha) leaves the domain at j = " +
                             std::to_string(j) + " (radius " + std::to_string(need) +
                             " > clearance " + std::to_string(room) + ")",
                         j);
    seq.points.push_back(domain.axis_point(eps));
    seq.radii.push_back(eps);
    seq.clearance.push_back(room);
  }
  return seq;
}

// ---------------------------------------------------------------------------
// Coefficient fields

/// a(x) = a0 + C0 |x - x0|^sigma.
struct ScalarField {
  double a0 = 1.0;
  double C0 = 1.0;
  double sigma = 1.0;
  Vector x0;

  double operator()(const Vector& x) const {
    return a0 + C0 * std::pow((x - x0).norm(), sigma);
  }
  double minimum() const { return a0; }
};

/// A(x) = A0 + C0 |x - x0|^gamma I_n.
struct MatrixField {
  Matrix A0;
  double C0 = 1.0;
  double gamma = 1.0;
  Vector x0;

  Matrix operator()(const Vector& x) const {
    const auto n = A0.rows();
    return A0 + C0 * std::pow((x - x0).norm(), gamma) * Matrix::Identity(n, n);
  }
  double min_determinant() const { return A0.determinant(); }
};

inline ScalarField make_scalar_field(double a0, double C0, double sigma, const Vector& x0) {
  if (!(a0 > 0.0) || !(C0 > 0.0) || !(sigma > 0.0))
    throw InputError("scalar field needs a0, C0, sigma > 0");
  return {a0, C0, sigma, x0};
}

inline MatrixField make_matrix_field(const Matrix& A0, double C0, double gamma, const Vector& x0) {
  if (A0.rows() != A0.cols() || A0.rows() != x0.size())
    throw InputError("A0 must be square with the dimension of x0");
  if (!A0.isApprox(A0.transpose(), 1e-12)) throw NotPositiveDefinite("A0 is not symmetric");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A0);
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite("A(x0) = A0 must be positive definite");
  if (!(C0 > 0.0) || !(gamma > 0.0)) throw InputError("matrix field needs C0, gamma > 0");
  return {A0, C0, gamma, x0};
}

// ---------------------------------------------------------------------------
// Sampling for the local comparison hypotheses

namespace detail {

inline double radical_inverse(std::uint64_t i, int base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

inline int nth_prime(int k) {
  static const int primes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                               43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};
  return primes[k % 25];
}

// Halton point k in (0,1)^dim.
inline std::vector<double> halton(std::uint64_t k, int dim) {
  std::vector<double> u(dim);
  for (int d = 0; d < dim; ++d) u[d] = radical_inverse(k + 1, nth_prime(d));
  return u;
}

// Point in the open unit ball of R^m from m+1 uniforms.
inline Vector ball_point(std::span<const double> u, int m) {
  Vector dir(m);
  for (int i = 0; i < m; ++i) dir[i] = std::sqrt(2.0) * boost::math::erf_inv(2.0 * u[i + 1] - 1.0);
  const double norm = dir.norm();
  if (norm == 0.0) return Vector::Zero(m);
  return dir / norm * std::pow(u[0], 1.0 / m);
}

}  // namespace detail

/// Deterministic quasi-uniform sample of Omega: half the budget inside
/// |x - x0| < diameter/10, a quarter in the rest of the cusp, a quarter in
/// the bulk ball.
inline std::vector<Vector> sample_domain(const CuspDomain& dom, int sample_count) {
  const int n = dom.dim();
  const double near = std::min(dom.diameter_bound() / 10.0, dom.spine_length);
  std::vector<Vector> pts;
  pts.reserve(sample_count);
  for (int k = 0; k < sample_count; ++k) {
    const auto u = detail::halton(static_cast<std::uint64_t>(k), n + 1);
    const int bucket = k % 4;
    if (bucket < 3) {
      const double h = (bucket < 2 ? near : dom.spine_length) * u[0];
      Vector x(n);
      x.head(n - 1) = dom.kappa * std::pow(h, dom.alpha) *
                      detail::ball_point(std::span(u).subspan(1), n - 1);
      x[n - 1] = h;
      if (h > 0.0) pts.push_back(std::move(x));
    } else {
      pts.push_back(dom.axis_point(dom.spine_length) +
                    dom.bulk_radius * detail::ball_point(std::span(u).subspan(0), n));
    }
  }
  return pts;
}

struct H2Bound {
  double C0;
  double sigma;
};

/// a(x) - a(x0) <= C0 |x - x0|^sigma at every sample.
inline bool check_h2(const std::function<double(const Vector&)>& a, const Vector& x0,
                     H2Bound bound, const CuspDomain& dom, int sample_count) {
  const double a_at_x0 = a(x0);
  for (const auto& x : sample_domain(dom, sample_count)) {
    const double allowed = bound.C0 * std::pow((x - x0).norm(), bound.sigma);
    if (a(x) - a_at_x0 > allowed + 1e-14 * std::max(1.0, std::abs(a_at_x0))) return false;
  }
  return true;
}

inline bool check_h2(const ScalarField& field, const CuspDomain& dom, int sample_count) {
  return check_h2(field, field.x0, {field.C0, field.sigma}, dom, sample_count);
}

struct H1Bound {
  double C0;
  double gamma;
};

inline constexpr double kBilinearSlack = 1e-12;

/// A(x) <= A(x0) + C0 |x - x0|^gamma I in the bilinear-form order, i.e. the
/// smallest eigenvalue of C0 r^gamma I - (A(x) - A(x0)) is >= -1e-12.
inline bool check_h1(const std::function<Matrix(const Vector&)>& A, const Vector& x0,
                     H1Bound bound, const CuspDomain& dom, int sample_count) {
  const Matrix at_x0 = A(x0);
  const auto n = at_x0.rows();
  for (const auto& x : sample_domain(dom, sample_count)) {
    const double r = (x - x0).norm();
    const Matrix slack =
        bound.C0 * std::pow(r, bound.gamma) * Matrix::Identity(n, n) - (A(x) - at_x0);
    Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (slack + slack.transpose()),
                                              Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -kBilinearSlack) return false;
  }
  return true;
}

inline bool check_h1(const MatrixField& field, const CuspDomain& dom, int sample_count) {
  return check_h1(field, field.x0, {field.C0, field.gamma}, dom, sample_count);
}

// ---------------------------------------------------------------------------
// Linear reduction y = D P x

/// P A0 P^t = diag(lambda_i) with lambda sorted descending, D = diag(lambda_i^{-1/2}).
/// Under y = D P x the quotient with A(x) is bounded by
///   [m_A^{1/n} int|grad u|^2 + C1 int |y - y0|^gamma |grad u|^2 - lambda C2 int u^2]
///   / (int |u|^{2*})^{2/2*},
/// with m_A = det A0, C2 = m_A^{1/n} (the zero-order term transforms exactly) and
/// C1 = C0 m_A^{1/n} lambda_max^{gamma/2} / lambda_min.
struct LinearReduction {
  Matrix P;
  Matrix D;
  Vector eigenvalues;  // descending
  double determinant = 0.0;
  double C2 = 0.0;

  double energy_factor() const {
    return std::pow(determinant, 1.0 / static_cast<double>(eigenvalues.size()));
  }
  double C1(double C0, double gamma) const {
    return C0 * energy_factor() * std::pow(eigenvalues.maxCoeff(), 0.5 * gamma) /
           eigenvalues.minCoeff();
  }
  Matrix map() const { return D * P; }
  Vector apply(const Vector& x) const { return D * (P * x); }
};

inline LinearReduction reduce_linear(const Matrix& A0) {
  if (A0.rows() != A0.cols()) throw InputError("A0 must be square");
  if (!A0.isApprox(A0.transpose(), 1e-12)) throw NotPositiveDefinite("A0 is not symmetric");
  const auto n = A0.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(A0);
  if (eig.info() != Eigen::Success) throw ConvergenceError("eigen-decomposition failed");
  if (eig.eigenvalues().minCoeff() <= 0.0)
    throw NotPositiveDefinite("A0 has a non-positive eigenvalue");
  LinearReduction red;
  red.P = Matrix(n, n);
  red.D = Matrix::Zero(n, n);
  red.eigenvalues = Vector(n);
  // Descending eigenvalues; ties ordered by the position of each vector's
  // dominant component, so diagonal inputs give a permutation-free P.
  std::vector<Eigen::Index> order(n), lead(n);
  std::vector<Vector> vecs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    Vector v = eig.eigenvectors().col(k);
    v.cwiseAbs().maxCoeff(&lead[k]);
    if (v[lead[k]] < 0.0) v = -v;
    vecs[k] = v;
    order[k] = k;
  }
  const double spread = 1e-12 * eig.eigenvalues().cwiseAbs().maxCoeff();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double la = eig.eigenvalues()[a], lb = eig.eigenvalues()[b];
    if (std::abs(la - lb) > spread) return la > lb;
    return lead[a] < lead[b];
  });
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index src = order[i];
    red.P.row(i) = vecs[src].transpose();
    red.eigenvalues[i] = eig.eigenvalues()[src];
    red.D(i, i) = 1.0 / std::sqrt(red.eigenvalues[i]);
  }
  red.determinant = red.eigenvalues.prod();
  red.C2 = red.energy_factor();
  return red;
}

/// Image of a witness sequence under y = D P x. The transformed balls contain
/// balls of radius lambda_max^{-1/2} delta eps_j^alpha about y_j; in terms of
/// eps'_j = |y_j - y0| <= lambda_min^{-1/2} eps_j this is a witness with
/// delta' = delta lambda_max^{-1/2} lambda_min^{alpha/2}.
struct TransformedWitness {
  std::vector<Vector> points;
  std::vector<double> radii;
  double delta = 0.0;
};

inline TransformedWitness transform_witness(const SingularSequence& seq,
                                            const LinearReduction& red) {
  TransformedWitness out;
  const double lmax = red.eigenvalues.maxCoeff();
  const double lmin = red.eigenvalues.minCoeff();
  out.delta = seq.delta / std::sqrt(lmax) * std::pow(lmin, 0.5 * seq.domain.alpha);
  for (const auto& x : seq.points) {
    out.points.push_back(red.apply(x));
    out.radii.push_back(out.points.back().norm());
  }
  return out;
}

}  // namespace bnlab

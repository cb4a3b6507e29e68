#pragma once

// Admissibility arithmetic for the exponents (sigma or gamma, alpha, beta),
// log-log fits of the bubble asymptotics, and the energy quotient
//
//     Q_j = (m I1 + C I4(theta) - lambda I3) / I2^{p/p*}
//
// compared against the compactness level m K(n,p)^{-p}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "bnlab/bubble_engine.hpp"
#include "bnlab/errors.hpp"
#include "bnlab/parallel.hpp"
#include "bnlab/singular_geometry.hpp"
#include "bnlab/sobolev_extremals.hpp"

namespace bnlab {

// ---------------------------------------------------------------------------
// Admissibility

struct BetaInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool empty() const { return !(lo < hi); }
  double midpoint() const { return 0.5 * (lo + hi); }
  bool contains(double beta) const { return lo < beta && beta < hi; }
};

struct AdmissibilityReport {
  bool linear = false;
  double exponent = 0.0;   // gamma (linear) or sigma (quasilinear)
  double alpha = 0.0;
  double threshold = 0.0;  // exponent must exceed this
  double alpha_max = 0.0;  // alpha must stay below this
  BetaInterval beta_interval;
  bool admissible = false;
  std::string reason;      // empty when admissible
};

/// Thresholds and the beta window. Quasilinear (n > p^2):
///   sigma > (np - p^2)/(n - p^2),  alpha in [1, sigma (n - p^2)/(np - p^2)),
///   beta in (alpha (n-p)/(n-p^2), sigma/p).
/// Linear (p = 2, n >= 5) is the same arithmetic with sigma -> gamma.
inline AdmissibilityReport admissibility(const SobolevSetup& setup, double gamma_or_sigma,
                                         double alpha, bool linear) {
  const double n = setup.n;
  const double p = setup.p;
  if (linear) {
    if (p != 2.0) throw DimensionError("the linear operator case has p = 2");
    if (setup.n < 5) throw DimensionError("the linear operator case needs n >= 5");
  } else if (!setup.supercritical_dim) {
    throw DimensionError("the quasilinear case needs n > p^2");
  }
  AdmissibilityReport r;
  r.linear = linear;
  r.exponent = gamma_or_sigma;
  r.alpha = alpha;
  r.threshold = (n * p - p * p) / (n - p * p);
  r.alpha_max = gamma_or_sigma * (n - p * p) / (n * p - p * p);
  r.beta_interval = {alpha * (n - p) / (n - p * p), gamma_or_sigma / p};
  if (!(gamma_or_sigma > r.threshold))
    r.reason = "exponent " + std::to_string(gamma_or_sigma) + " does not exceed threshold " +
               std::to_string(r.threshold);
  else if (!(alpha >= 1.0))
    r.reason = "alpha < 1";
  else if (!(alpha < r.alpha_max))
    r.reason = "alpha >= alpha_max = " + std::to_string(r.alpha_max);
  else if (r.beta_interval.empty())
    r.reason = "empty beta interval";
  r.admissible = r.reason.empty();
  return r;
}

/// The exponent inequalities 1 <= alpha < beta, p beta < sigma and
/// p beta < (n-p)(beta-alpha)/(p-1) < n(beta-alpha)/(p-1).
struct ExponentInequalities {
  bool alpha_at_least_one = false;
  bool alpha_below_beta = false;
  bool p_beta_below_sigma = false;
  bool p_beta_below_cutoff_order = false;
  bool cutoff_below_norm_order = false;

  bool all() const {
    return alpha_at_least_one && alpha_below_beta && p_beta_below_sigma &&
           p_beta_below_cutoff_order && cutoff_below_norm_order;
  }
  std::string first_violation() const {
    if (!alpha_at_least_one) return "1 <= alpha";
    if (!alpha_below_beta) return "alpha < beta";
    if (!p_beta_below_sigma) return "p*beta < sigma";
    if (!p_beta_below_cutoff_order) return "p*beta < (n-p)(beta-alpha)/(p-1)";
    if (!cutoff_below_norm_order) return "(n-p)(beta-alpha)/(p-1) < n(beta-alpha)/(p-1)";
    return {};
  }
};

/// Orders of the competing terms at a given beta.
struct TermOrders {
  double lambda_term = 0.0;  // p beta
  double weight_term = 0.0;  // sigma
  double cutoff_term = 0.0;  // (n-p)(beta-alpha)/(p-1), the gradient deficit
  double norm_term = 0.0;    // n(beta-alpha)/(p-1), the critical-norm deficit
  double mass_correction = 0.0;  // (n-p^2)(beta-alpha)/(p-1)

  bool lambda_dominates() const {
    return lambda_term < weight_term && lambda_term < cutoff_term;
  }
};

inline TermOrders term_orders(const SobolevSetup& s, double sigma, double alpha, double beta) {
  const double n = s.n, p = s.p;
  return {p * beta, sigma, (n - p) * (beta - alpha) / (p - 1.0),
          n * (beta - alpha) / (p - 1.0), (n - p * p) * (beta - alpha) / (p - 1.0)};
}

inline ExponentInequalities exponent_inequalities(const SobolevSetup& s, double sigma,
                                                  double alpha, double beta) {
  const auto o = term_orders(s, sigma, alpha, beta);
  return {alpha >= 1.0, alpha < beta, o.lambda_term < o.weight_term,
          o.lambda_term < o.cutoff_term, o.cutoff_term < o.norm_term};
}

// ---------------------------------------------------------------------------
// Slope fits

enum class FitMode { direct, deficit_from_limit };

struct SlopeFit {
  double claimed_exponent = std::numeric_limits<double>::quiet_NaN();
  double fitted_exponent = 0.0;
  double log_prefactor = 0.0;
  double r_squared = 0.0;
  bool usable = false;
  std::size_t points = 0;

  double relative_deviation() const {
    return std::abs(fitted_exponent - claimed_exponent) / std::abs(claimed_exponent);
  }
};

inline constexpr double kNoiseFloorFactor = 10.0;

/// Least-squares slope of log(value) (or log|limit - value|) against log(eps).
/// `errors`, when given, are absolute error estimates of the fitted
/// quantities; any quantity below ten times its error makes the fit unusable.
inline SlopeFit fit_slope(std::span<const double> eps, std::span<const double> values,
                          FitMode mode = FitMode::direct, double limit = 0.0,
                          std::span<const double> errors = {},
                          double claimed = std::numeric_limits<double>::quiet_NaN()) {
  const std::size_t m = eps.size();
  if (m != values.size()) throw FitError("eps and values differ in length");
  if (!errors.empty() && errors.size() != m) throw FitError("errors differ in length");
  if (m < 4) throw FitError("a slope fit needs at least 4 points");
  for (std::size_t i = 0; i + 1 < m; ++i)
    if (!(eps[i + 1] < eps[i]) || !(eps[i + 1] > 0.0))
      throw FitError("eps must be positive and strictly decreasing");

  std::vector<double> y(m);
  bool usable = true;
  int sign = 0;
  for (std::size_t i = 0; i < m; ++i) {
    double q = values[i];
    if (mode == FitMode::deficit_from_limit) {
      q = limit - values[i];
      const int sgn = (q > 0) - (q < 0);
      if (sgn == 0 || (sign != 0 && sgn != sign))
        throw FitError("deficits from the limit change sign");
      sign = sgn;
    } else if (!(q > 0.0)) {
      throw FitError("direct-mode fit needs positive values");
    }
    const double mag = std::abs(q);
    if (!errors.empty() && mag < kNoiseFloorFactor * errors[i]) usable = false;
    y[i] = std::log(mag);
  }
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < m; ++i) sx += std::log(eps[i]), sy += y[i];
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double dx = std::log(eps[i]) - mx, dy = y[i] - my;
    sxx += dx * dx, sxy += dx * dy, syy += dy * dy;
  }
  SlopeFit fit;
  fit.claimed_exponent = claimed;
  fit.fitted_exponent = sxy / sxx;
  fit.log_prefactor = my - fit.fitted_exponent * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
  fit.usable = usable;
  fit.points = m;
  return fit;
}

// ---------------------------------------------------------------------------
// Experiments

struct ScalarCoefficients {
  double a0 = 1.0;
  double C0 = 1.0;
  double sigma = 1.0;
};

struct MatrixCoefficients {
  Matrix A0;
  double C0 = 1.0;
  double gamma = 1.0;
};

struct Experiment {
  int n = 6;
  double p = 2.0;
  double alpha = 1.0;
  double kappa = 1.0;
  double spine_length = 1.0;
  double bulk_radius = 0.5;
  std::variant<ScalarCoefficients, MatrixCoefficients> coefficients;
  double delta = 0.5;
  double eps0 = 0.1;
  double ratio = 0.6;
  int j_max = 10;
  std::optional<double> beta;  // empty: midpoint of the admissible window
  double plateau = 0.5;
  int jobs = 1;

  bool linear() const { return std::holds_alternative<MatrixCoefficients>(coefficients); }
  double exponent() const {
    return linear() ? std::get<MatrixCoefficients>(coefficients).gamma
                    : std::get<ScalarCoefficients>(coefficients).sigma;
  }
};

/// Coefficients of the quotient once the operator is fixed: for the scalar
/// field (m, C, lambda factor) = (a0, C0, 1); for the matrix field after
/// y = D P x, (det(A0)^{1/n}, C1, C2).
struct QuotientCoefficients {
  double minimum = 1.0;        // m
  double weight = 0.0;         // C0 or C1
  double theta = 0.0;          // sigma or gamma
  double lambda_factor = 1.0;  // 1 or C2
};

struct PreparedExperiment {
  Experiment experiment;
  SobolevSetup setup;
  Instanton instanton;
  SharpConstant sharp;
  std::optional<MassConstant> mass;
  CuspDomain domain;
  SingularSequence sequence;
  AdmissibilityReport admissibility;
  double beta = 0.0;
  CutoffSpec cutoff;
  std::optional<LinearReduction> reduction;
  QuotientCoefficients coefficients;
  double gradient_energy = 0.0;  // int |grad v_1|^p
  double critical_norm = 0.0;    // int |v_1|^{p*}

  double bound() const { return coefficients.minimum * sharp.k_inv_pow_p; }
};

/// Validates and assembles everything one run needs. With
/// `require_admissible` the exponents must satisfy the theorem hypotheses and
/// any explicit beta must satisfy every exponent inequality.
inline PreparedExperiment prepare(const Experiment& e, bool require_admissible = true) {
  PreparedExperiment out;
  out.experiment = e;
  out.setup = make_setup(e.n, e.p);
  out.instanton = make_instanton(out.setup);
  out.sharp = sharp_constant_closed_form(out.setup);
  if (out.setup.supercritical_dim) out.mass = mass_constant(out.instanton);
  out.domain = build_domain(out.setup, e.alpha, e.kappa, e.spine_length, e.bulk_radius);
  out.admissibility = admissibility(out.setup, e.exponent(), e.alpha, e.linear());
  if (require_admissible && !out.admissibility.admissible)
    throw ParameterError("configuration outside the theorem hypotheses: " +
                         out.admissibility.reason);
  out.beta = e.beta.value_or(out.admissibility.beta_interval.midpoint());
  if (e.beta && require_admissible) {
    const auto ineq = exponent_inequalities(out.setup, e.exponent(), e.alpha, *e.beta);
    if (!ineq.all())
      throw ParameterError("beta = " + std::to_string(*e.beta) +
                           " violates the exponent inequality " + ineq.first_violation());
  }
  out.sequence = witness_sequence(out.domain, e.delta, e.eps0, e.ratio, e.j_max);
  out.cutoff = make_cutoff(e.delta, e.plateau);
  out.gradient_energy = gradient_energy(out.instanton).value;
  out.critical_norm = critical_norm(out.instanton).value;
  if (e.linear()) {
    const auto& mc = std::get<MatrixCoefficients>(e.coefficients);
    make_matrix_field(mc.A0, mc.C0, mc.gamma, out.domain.tip());
    out.reduction = reduce_linear(mc.A0);
    out.coefficients = {out.reduction->energy_factor(), out.reduction->C1(mc.C0, mc.gamma),
                        mc.gamma, out.reduction->C2};
  } else {
    const auto& sc = std::get<ScalarCoefficients>(e.coefficients);
    make_scalar_field(sc.a0, sc.C0, sc.sigma, out.domain.tip());
    out.coefficients = {sc.a0, sc.C0, sc.sigma, 1.0};
  }
  return out;
}

struct BubbleRow {
  std::size_t j = 0;
  double eps = 0.0;
  BubbleShape shape;
  IntegralSet integrals;
};

/// Integrals of every bubble along the witness sequence. Each row is computed
/// independently into its own slot, so results do not depend on `jobs`.
inline std::vector<BubbleRow> evaluate_sequence(const PreparedExperiment& pe,
                                                std::vector<double> thetas = {}) {
  if (thetas.empty()) thetas = {pe.coefficients.theta};
  std::vector<BubbleRow> rows(pe.sequence.size());
  parallel_for(rows.size(), pe.experiment.jobs, [&](std::size_t j) {
    const auto b = make_bubble(pe.sequence, j, pe.beta, pe.cutoff, pe.instanton);
    rows[j] = {j, b.eps(), b.shape(), evaluate_integrals(b, thetas)};
  });
  return rows;
}

// ---------------------------------------------------------------------------
// Quotients

struct QuotientValue {
  double Q = 0.0;
  double margin = 0.0;        // bound - Q
  double margin_error = 0.0;  // absolute, propagated from the integral errors
};

/// Q and bound - Q without cancellation. With E1 = int|grad v_1|^p,
/// N2 = int|v_1|^{p*} and the extremal identity E1 = K^{-p} N2^{p/p*},
///   (bound - Q) I2^{p/p*} = m E1 [(1 - d2/N2)^{p/p*} - 1] - m d1
///                           - C I4 + lambda I3.
inline QuotientValue quotient_value(const IntegralSet& I, const QuotientCoefficients& c,
                                    double lambda, double k_inv_pow_p, double E1, double N2,
                                    const SobolevSetup& s) {
  const double ratio = s.p / s.p_star;
  const double I4 = I.I4.at(c.theta);
  const double lam = lambda * c.lambda_factor;
  const double norm_loss = std::expm1(ratio * std::log1p(-I.d2 / N2));
  const double numer = c.minimum * E1 * norm_loss - c.minimum * I.d1 - c.weight * I4 + lam * I.I3;
  const double norm = std::pow(I.I2, ratio);
  const double margin = numer / norm;
  const double err = c.minimum * E1 * ratio * I.d2_err / N2 + c.minimum * I.d1_err +
                     c.weight * I.I4_err.at(c.theta) + lam * I.I3_err;
  return {c.minimum * k_inv_pow_p - margin, margin,
          err / norm + std::abs(margin) * ratio * I.I2_err / I.I2};
}

struct QuotientReport {
  double lambda = 0.0;
  double bound = 0.0;
  std::vector<double> eps;
  std::vector<double> Q;
  std::vector<double> margin;
  std::vector<double> margin_ratio;  // margin / (a lambda_eff eps^{p beta})
  std::vector<double> Q_raw;         // linear case: lambda without the C2 factor
  std::vector<double> error;         // relative quadrature error per row
  std::vector<double> margin_error;  // absolute error of bound - Q
  std::optional<std::size_t> first_strict_j;

  /// Rows whose margin exceeds ten times its error estimate.
  std::vector<std::size_t> usable_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < margin.size(); ++j)
      if (std::abs(margin[j]) > kNoiseFloorFactor * margin_error[j]) out.push_back(j);
    return out;
  }
};

inline QuotientReport quotient_sequence(const PreparedExperiment& pe,
                                        const std::vector<BubbleRow>& rows, double lambda) {
  if (!(lambda >= 0.0)) throw ParameterError("lambda must be non-negative");
  QuotientReport rep;
  rep.lambda = lambda;
  rep.bound = pe.bound();
  const auto& s = pe.setup;
  const double a = pe.mass ? pe.mass->a : std::numeric_limits<double>::quiet_NaN();
  auto raw = pe.coefficients;
  raw.lambda_factor = 1.0;
  for (const auto& row : rows) {
    const auto v = quotient_value(row.integrals, pe.coefficients, lambda, pe.sharp.k_inv_pow_p,
                                  pe.gradient_energy, pe.critical_norm, s);
    rep.eps.push_back(row.eps);
    rep.Q.push_back(v.Q);
    rep.margin.push_back(v.margin);
    rep.margin_error.push_back(v.margin_error);
    const double scale = a * lambda * pe.coefficients.lambda_factor * std::pow(row.eps, s.p * pe.beta);
    rep.margin_ratio.push_back(scale > 0.0 ? v.margin / scale
                                           : std::numeric_limits<double>::quiet_NaN());
    rep.Q_raw.push_back(quotient_value(row.integrals, raw, lambda, pe.sharp.k_inv_pow_p,
                                       pe.gradient_energy, pe.critical_norm, s).Q);
    rep.error.push_back(row.integrals.max_relative_error());
  }
  for (std::size_t j = rep.margin.size(); j-- > 0;) {
    if (!(rep.margin[j] > 0.0)) break;
    rep.first_strict_j = j;
  }
  return rep;
}

/// Matrix case with A0 = s I only: re-evaluates every quotient in the
/// original x-coordinates on the pulled-back bubble u(x) = w(D P x), whose
/// shape is the y-space shape stretched by sqrt(s), with the scalar field
/// a(x) = s + C0 |x - x0|^gamma. Agreement with quotient_sequence checks the
/// transformation constants.
inline std::vector<double> embedded_scalar_quotients(const PreparedExperiment& pe,
                                                     const std::vector<BubbleRow>& rows,
                                                     double lambda) {
  if (!pe.reduction) throw ParameterError("embedded scalar check needs a matrix field");
  const auto& mc = std::get<MatrixCoefficients>(pe.experiment.coefficients);
  const double s = mc.A0(0, 0);
  const auto n = mc.A0.rows();
  if (!(mc.A0 - s * Matrix::Identity(n, n)).isZero(1e-14 * s))
    throw ParameterError("embedded scalar check needs A0 proportional to the identity");
  const double stretch = std::sqrt(s);
  const QuotientCoefficients scalar{s, mc.C0, mc.gamma, 1.0};
  std::vector<double> out(rows.size());
  parallel_for(rows.size(), pe.experiment.jobs, [&](std::size_t i) {
    auto shape = rows[i].shape;
    shape.support *= stretch;
    shape.concentration *= stretch;
    shape.center_distance *= stretch;
    const auto I = evaluate_integrals(shape, pe.instanton, {mc.gamma});
    out[i] = quotient_value(I, scalar, lambda, pe.sharp.k_inv_pow_p, pe.gradient_energy,
                            pe.critical_norm, pe.setup).Q;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Asymptotic orders

struct EstimateRow {
  std::string name;
  SlopeFit fit;
  std::vector<std::size_t> window;  // j indices used
};

struct EstimateTable {
  std::vector<EstimateRow> rows;  // d1, d2, I3, I4
  double i3_prefactor = 0.0;      // extrapolated I3 / eps^{p beta}
  double mass_constant = 0.0;
  double prefactor_deviation = 0.0;  // relative
};

inline constexpr std::size_t kFitWindow = 5;

namespace detail {

inline EstimateRow fit_row(std::string name, const std::vector<BubbleRow>& rows,
                           const std::vector<double>& values, const std::vector<double>& errors,
                           double claimed) {
  std::vector<std::size_t> usable;
  for (std::size_t i = 0; i < rows.size(); ++i)
    if (values[i] > 0.0 && values[i] >= kNoiseFloorFactor * errors[i]) usable.push_back(i);
  EstimateRow row{std::move(name), {}, {}};
  row.fit.claimed_exponent = claimed;
  if (usable.size() < 4) return row;  // below the noise floor: widen the eps range
  const std::size_t take = std::min(kFitWindow, usable.size());
  row.window.assign(usable.end() - take, usable.end());
  std::vector<double> e, v, err;
  for (auto i : row.window) e.push_back(rows[i].eps), v.push_back(values[i]), err.push_back(errors[i]);
  row.fit = fit_slope(e, v, FitMode::direct, 0.0, err, claimed);
  return row;
}

}  // namespace detail

/// Fits the four asymptotic orders along the sequence: the gradient deficit
/// against (n-p)(beta-alpha)/(p-1), the critical-norm deficit against
/// n(beta-alpha)/(p-1), I3 against p beta and I4(sigma) against sigma.
inline EstimateTable verify_estimates(const PreparedExperiment& pe,
                                      const std::vector<BubbleRow>& rows) {
  const auto& s = pe.setup;
  const auto orders = term_orders(s, pe.coefficients.theta, pe.experiment.alpha, pe.beta);
  const std::size_t m = rows.size();
  std::vector<double> d1(m), d1e(m), d2(m), d2e(m), i3(m), i3e(m), i4(m), i4e(m);
  for (std::size_t i = 0; i < m; ++i) {
    const auto& I = rows[i].integrals;
    d1[i] = I.d1, d1e[i] = I.d1_err;
    d2[i] = I.d2, d2e[i] = I.d2_err;
    i3[i] = I.I3, i3e[i] = I.I3_err;
    i4[i] = I.I4.at(pe.coefficients.theta), i4e[i] = I.I4_err.at(pe.coefficients.theta);
  }
  EstimateTable t;
  t.rows.push_back(detail::fit_row("gradient_deficit", rows, d1, d1e, orders.cutoff_term));
  t.rows.push_back(detail::fit_row("norm_deficit", rows, d2, d2e, orders.norm_term));
  t.rows.push_back(detail::fit_row("mass_term", rows, i3, i3e, orders.lambda_term));
  t.rows.push_back(detail::fit_row("weighted_gradient", rows, i4, i4e, orders.weight_term));
  if (pe.mass && m >= 2) {
    // I3 / eps^{p beta} = a + C eps^{kappa}; eliminate C from the last two rows.
    const double k = orders.mass_correction;
    const double e1 = rows[m - 2].eps, e2 = rows[m - 1].eps;
    const double p1 = i3[m - 2] / std::pow(e1, orders.lambda_term);
    const double p2 = i3[m - 1] / std::pow(e2, orders.lambda_term);
    const double w1 = std::pow(e1, k), w2 = std::pow(e2, k);
    t.i3_prefactor = (p2 * w1 - p1 * w2) / (w1 - w2);
    t.mass_constant = pe.mass->a;
    t.prefactor_deviation = std::abs(t.i3_prefactor - t.mass_constant) / t.mass_constant;
  }
  return t;
}

// ---------------------------------------------------------------------------
// Exploratory sweep in alpha

struct SweepRow {
  double alpha = 0.0;
  double alpha_max = 0.0;
  BetaInterval beta_interval;
  double beta = 0.0;
  bool admissible = false;
  std::string region;  // "theorem" or "no-theorem region"
  TermOrders orders;
  bool evaluated = false;
  bool achieved = false;
  std::optional<std::size_t> first_strict_j;
  std::string note;
};

inline SweepRow sweep_point(const Experiment& base, double lambda, double alpha) {
  Experiment e = base;
  e.alpha = alpha;
  e.beta.reset();
  const auto setup = make_setup(e.n, e.p);
  const auto adm = admissibility(setup, e.exponent(), alpha, e.linear());
  SweepRow row;
  row.alpha = alpha;
  row.alpha_max = adm.alpha_max;
  row.beta_interval = adm.beta_interval;
  row.admissible = adm.admissible;
  row.region = adm.admissible ? "theorem" : "no-theorem region";
  row.beta = adm.beta_interval.midpoint();
  row.orders = term_orders(setup, e.exponent(), alpha, row.beta);
  if (adm.beta_interval.lo == adm.beta_interval.hi) {
    row.note = "empty beta interval";
    return row;
  }
  if (!(row.beta > alpha)) {
    row.note = "beta <= alpha, no bubble family";
    return row;
  }
  if (!row.orders.lambda_dominates())
    row.note = "lambda term does not dominate: p*beta >= min(sigma, cutoff order)";
  e.beta = row.beta;
  try {
    const auto pe = prepare(e, false);
    const auto rows = evaluate_sequence(pe);
    const auto rep = quotient_sequence(pe, rows, lambda);
    row.evaluated = true;
    row.achieved = std::any_of(rep.margin.begin(), rep.margin.end(), [](double m) { return m > 0.0; });
    row.first_strict_j = rep.first_strict_j;
  } catch (const WitnessError& err) {
    row.note = err.what();
  }
  return row;
}

inline std::vector<SweepRow> inadmissibility_sweep(const Experiment& base, double lambda,
                                                   const std::vector<double>& alphas) {
  std::vector<SweepRow> out;
  for (double a : alphas) out.push_back(sweep_point(base, lambda, a));
  return out;
}

}  // namespace bnlab

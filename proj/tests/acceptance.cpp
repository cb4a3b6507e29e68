// Acceptance harness: one PASS/FAIL line per criterion with its timing.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "bnlab/asymptotic_verifier.hpp"
#include "bnlab/radial_bn_solver.hpp"

namespace {

using namespace bnlab;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Experiment cusp6() {
  Experiment e;
  e.n = 6;
  e.p = 2.0;
  e.alpha = 1.2;
  e.coefficients = ScalarCoefficients{1e-4, 1e-2, 5.0};
  e.beta = 2.45;
  e.jobs = default_jobs();
  return e;
}

Outcome sharp_constants() {
  double worst = 0.0, worst_q = 0.0;
  for (int n = 3; n <= 8; ++n) {
    const auto s = make_setup(n, 2.0);
    const auto k = sharp_constant(s, 1e-6);
    worst = std::max(worst, k.relative_gap);
    const double q = instanton_quotient(make_instanton(s));
    worst_q = std::max(worst_q, std::abs(q - k.k_inv_pow_p) / k.k_inv_pow_p);
  }
  return {worst < 1e-6 && worst_q < 1e-6,
          fmt("max gap minimized %.2e, instanton %.2e", worst, worst_q)};
}

Outcome scaling_reduction() {
  struct Case {
    int n;
    double p, alpha, beta;
  };
  const std::vector<Case> cases{{5, 2.0, 1.0, 2.0}, {6, 2.0, 1.2, 2.45}, {10, 3.0, 1.0, 1.5}};
  double worst = 0.0;
  for (const auto& c : cases) {
    const auto s = make_setup(c.n, c.p);
    const auto dom = build_domain(s, c.alpha, 1.0, 1.0, 0.5);
    const auto seq = witness_sequence(dom, 0.5, 0.1, 0.6, 10);
    const auto inst = make_instanton(s);
    for (std::size_t j : {0u, 5u, 10u})
      for (double d : scaling_reduction_check(make_bubble(seq, j, c.beta, make_cutoff(0.5, 0.5), inst)))
        worst = std::max(worst, d);
  }
  return {worst < 1e-8, fmt("max relative discrepancy %.2e", worst)};
}

Outcome asymptotic_orders() {
  const auto pe = prepare(cusp6());
  const auto t = verify_estimates(pe, evaluate_sequence(pe));
  bool pass = t.prefactor_deviation < 0.05;
  std::string detail;
  for (const auto& r : t.rows) {
    const bool asserted = r.name == "mass_term" || r.name == "weighted_gradient";
    if (asserted) pass = pass && r.fit.usable && r.fit.relative_deviation() < 0.05;
    if (!asserted && r.fit.usable) pass = pass && r.fit.relative_deviation() < 0.05;
    detail += r.name + " " + fmt("%.4f/%.2f", r.fit.fitted_exponent, r.fit.claimed_exponent) +
              (r.fit.usable ? "" : " (below noise floor)") + "; ";
  }
  detail += fmt("I3 prefactor deviation %.2e", t.prefactor_deviation);
  return {pass, detail};
}

Outcome strict_inequality() {
  const auto pe = prepare(cusp6());
  const auto rows = evaluate_sequence(pe);
  const auto with = quotient_sequence(pe, rows, 1.0);
  const auto without = quotient_sequence(pe, rows, 0.0);
  bool pass = with.first_strict_j.has_value();
  const auto usable = with.usable_rows();
  pass = pass && usable.size() >= 2;
  double lo = INFINITY, hi = -INFINITY;
  if (usable.size() >= 2)
    for (std::size_t k = usable.size() - 2; k < usable.size(); ++k) {
      lo = std::min(lo, with.margin_ratio[usable[k]]);
      hi = std::max(hi, with.margin_ratio[usable[k]]);
    }
  pass = pass && lo >= 0.9 && hi <= 1.1;
  bool control = true;
  for (std::size_t j = 0; j < without.Q.size(); ++j) control = control && without.Q[j] >= without.bound;
  pass = pass && control;
  return {pass, "first_strict_j " +
                    (with.first_strict_j ? std::to_string(*with.first_strict_j) : std::string("none")) +
                    fmt(", margin_ratio tail in [%.4f, %.4f]", lo, hi) +
                    (control ? ", lambda = 0 control holds" : ", lambda = 0 control FAILS")};
}

Outcome linear_reduction() {
  // Matrix field with A0 = m^{2/n} I on the reference cusp, m = 1e-4.
  Experiment e = cusp6();
  const double s = std::pow(1e-4, 2.0 / 6.0);
  e.coefficients = MatrixCoefficients{s * Matrix::Identity(6, 6), 1e-2, 5.0};
  const auto pe = prepare(e);
  const auto rows = evaluate_sequence(pe);
  const auto q = quotient_sequence(pe, rows, 1.0);
  const auto emb = embedded_scalar_quotients(pe, rows, 1.0);
  double worst = 0.0;
  for (std::size_t j = 0; j < rows.size(); ++j) worst = std::max(worst, std::abs(emb[j] - q.Q[j]) / q.Q[j]);

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double unit_err = 0.0;
  bool h1 = true;
  const auto dom = build_domain(make_setup(5, 2.0), 1.1, 1.0, 1.0, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix B(5, 5);
    for (int i = 0; i < 25; ++i) B(i / 5, i % 5) = u(rng);
    const Matrix A0 = B * B.transpose() + 0.1 * Matrix::Identity(5, 5);
    const auto red = reduce_linear(A0);
    const Matrix unit = red.D * red.P * A0 * red.P.transpose() * red.D;
    unit_err = std::max(unit_err, (unit - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff());
    h1 = h1 && check_h1(make_matrix_field(A0, 1e-2, 7.0, dom.tip()), dom, 500);
  }
  return {worst < 1e-8 && unit_err < 1e-10 && h1,
          fmt("matrix vs scalar %.2e, DPA0PtD - I %.2e", worst, unit_err) +
              (h1 ? ", H1 holds" : ", H1 FAILS")};
}

Outcome ball_oracle() {
  constexpr double pi = std::numbers::pi;
  BallSearch search;
  search.jobs = default_jobs();
  const double l3 = principal_eigenvalue(3);
  const auto t = existence_threshold(3, 0.002, search);
  const double t_err = std::abs(t.threshold - pi * pi / 4) / (pi * pi / 4);
  bool pass = std::abs(l3 - pi * pi) / (pi * pi) < 1e-3 && t_err < 0.01;
  std::string solved;
  for (auto [n, frac] : std::vector<std::pair<int, double>>{{4, 0.1}, {4, 0.9}, {5, 0.1}, {5, 0.9}}) {
    const bool ok = solve_ball(n, frac * principal_eigenvalue(n), search).has_value();
    pass = pass && ok;
    solved += ok ? "ok " : "missing ";
  }
  const bool none = !solve_ball(3, 0.1 * l3, search).has_value();
  pass = pass && none;
  return {pass, fmt("lambda1(3) %.10f, threshold %.6f (rel err %.2e)", l3, t.threshold, t_err) +
                    ", solutions " + solved + (none ? "; (3, 0.1) NoSolution" : "; (3, 0.1) solved")};
}

Outcome witness() {
  const auto dom = build_domain(make_setup(5, 2.0), 1.5, 1.0, 1.0, 0.5);
  bool pass = true;
  std::string detail;
  try {
    const auto seq = witness_sequence(dom, 0.5 * dom.kappa, 0.1, 0.6, 15);
    detail = std::to_string(seq.size()) + " balls contained";
  } catch (const WitnessError& e) {
    pass = false;
    detail = e.what();
  }
  try {
    witness_sequence(dom, 2.0 * dom.kappa, 0.1, 0.6, 15);
    pass = false;
    detail += "; delta = 2 kappa unexpectedly contained";
  } catch (const WitnessError& e) {
    pass = pass && e.failing_index() == 0;
    detail += "; delta = 2 kappa fails at j = " + std::to_string(e.failing_index());
  }
  return {pass, detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {"1 sharp constant cross-validation", 10, sharp_constants},
      {"2 scaling-reduction identity", 30, scaling_reduction},
      {"3 asymptotic orders", 120, asymptotic_orders},
      {"4 strict inequality", 60, strict_inequality},
      {"5 linear-case reduction", 10, linear_reduction},
      {"6 classical ball oracle", 120, ball_oracle},
      {"7 witness balls", 1, witness}};
  int failures = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = dt < c.budget_s;
    const bool pass = o.pass && in_time;
    if (!pass) ++failures;
    std::printf("%s criterion %s: %s [%.2f s of %.0f s]\n", pass ? "PASS" : "FAIL", c.name,
                o.detail.c_str(), dt, c.budget_s);
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}

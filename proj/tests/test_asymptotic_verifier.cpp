#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bnlab/asymptotic_verifier.hpp"

namespace {

using namespace bnlab;

Experiment cusp6() {
  Experiment e;
  e.n = 6;
  e.p = 2.0;
  e.alpha = 1.2;
  e.coefficients = ScalarCoefficients{1e-4, 1e-2, 5.0};
  e.beta = 2.45;
  return e;
}

TEST(Admissibility, LinearThresholdInFiveDimensions) {
  const auto r = admissibility(make_setup(5, 2.0), 7.0, 1.0, true);
  EXPECT_DOUBLE_EQ(r.threshold, 6.0);
  EXPECT_DOUBLE_EQ(r.alpha_max, 7.0 / 6.0);
  EXPECT_TRUE(r.admissible);
  EXPECT_FALSE(admissibility(make_setup(5, 2.0), 6.0, 1.0, true).admissible);
}

TEST(Admissibility, QuasilinearWindow) {
  const auto r = admissibility(make_setup(6, 2.0), 5.0, 1.2, false);
  EXPECT_TRUE(r.admissible);
  EXPECT_NEAR(r.beta_interval.lo, 2.4, 1e-14);
  EXPECT_NEAR(r.beta_interval.hi, 2.5, 1e-14);
  const auto edge = admissibility(make_setup(6, 2.0), 5.0, 1.25, false);
  EXPECT_FALSE(edge.admissible);
  EXPECT_TRUE(edge.beta_interval.empty());
}

TEST(Admissibility, DimensionErrors) {
  EXPECT_THROW(admissibility(make_setup(4, 2.0), 5.0, 1.0, false), DimensionError);
  EXPECT_THROW(admissibility(make_setup(4, 2.0), 7.0, 1.0, true), DimensionError);
  EXPECT_THROW(admissibility(make_setup(10, 3.0), 7.0, 1.0, true), DimensionError);
}

TEST(Admissibility, InequalitiesHoldInsideWindow) {
  const std::vector<std::tuple<int, double, double, double>> cases = {
      {6, 2.0, 5.0, 1.2}, {5, 2.0, 7.0, 1.1}, {10, 3.0, 25.0, 1.0}, {7, 2.0, 6.0, 1.0}};
  for (auto [n, p, sigma, alpha] : cases) {
    const auto s = make_setup(n, p);
    const auto r = admissibility(s, sigma, alpha, false);
    ASSERT_TRUE(r.admissible) << n << " " << p;
    for (int k = 1; k < 20; ++k) {
      const double beta = r.beta_interval.lo + (r.beta_interval.hi - r.beta_interval.lo) * k / 20.0;
      const auto ineq = exponent_inequalities(s, sigma, alpha, beta);
      EXPECT_TRUE(ineq.all()) << ineq.first_violation();
      EXPECT_TRUE(term_orders(s, sigma, alpha, beta).lambda_dominates());
    }
    const auto out = exponent_inequalities(s, sigma, alpha, r.beta_interval.hi + 0.01);
    EXPECT_EQ(out.first_violation(), "p*beta < sigma");
  }
}

TEST(FitSlope, ExactPowerLaw) {
  std::vector<double> eps, v;
  for (int j = 0; j < 6; ++j) eps.push_back(0.1 * std::pow(0.5, j)), v.push_back(3.0 * std::pow(eps.back(), 2.5));
  const auto f = fit_slope(eps, v, FitMode::direct, 0.0, {}, 2.5);
  EXPECT_NEAR(f.fitted_exponent, 2.5, 1e-12);
  EXPECT_NEAR(f.log_prefactor, std::log(3.0), 1e-10);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_LT(f.relative_deviation(), 1e-12);
  EXPECT_TRUE(f.usable);
}

TEST(FitSlope, PerturbedAndDeficitModes) {
  std::vector<double> eps, v, w;
  for (int j = 0; j < 8; ++j) {
    const double e = 0.1 * std::pow(0.6, j);
    eps.push_back(e);
    v.push_back(std::pow(e, 2.0) * (1.0 + 0.5 * e));
    w.push_back(4.0 - 2.0 * std::pow(e, 1.5));
  }
  EXPECT_LT(fit_slope(eps, v, FitMode::direct, 0.0, {}, 2.0).relative_deviation(), 0.03);
  EXPECT_NEAR(fit_slope(eps, w, FitMode::deficit_from_limit, 4.0).fitted_exponent, 1.5, 1e-10);
  w[3] = 4.5;
  EXPECT_THROW(fit_slope(eps, w, FitMode::deficit_from_limit, 4.0), FitError);
}

TEST(FitSlope, NoiseFloorAndShapeErrors) {
  std::vector<double> eps{0.1, 0.05, 0.025, 0.0125}, v{1e-2, 2.5e-3, 6.25e-4, 1.5625e-4};
  std::vector<double> err{1e-6, 1e-6, 1e-6, 1e-4};
  EXPECT_FALSE(fit_slope(eps, v, FitMode::direct, 0.0, err).usable);
  EXPECT_THROW(fit_slope(std::vector<double>{0.1, 0.05, 0.01}, std::vector<double>{1, 2, 3}),
               FitError);
  std::vector<double> bad{0.1, 0.2, 0.05, 0.01};
  EXPECT_THROW(fit_slope(bad, v), FitError);
}

class Cusp6 : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    pe_ = new PreparedExperiment(prepare(cusp6()));
    rows_ = new std::vector<BubbleRow>(evaluate_sequence(*pe_));
  }
  static void TearDownTestSuite() {
    delete pe_;
    delete rows_;
  }
  static PreparedExperiment* pe_;
  static std::vector<BubbleRow>* rows_;
};
PreparedExperiment* Cusp6::pe_ = nullptr;
std::vector<BubbleRow>* Cusp6::rows_ = nullptr;

TEST_F(Cusp6, EstimatesMatchClaimedOrders) {
  const auto t = verify_estimates(*pe_, *rows_);
  ASSERT_EQ(t.rows.size(), 4u);
  for (const auto& r : t.rows) {
    EXPECT_TRUE(r.fit.usable) << r.name;
    EXPECT_LT(r.fit.relative_deviation(), 0.05) << r.name;
  }
  EXPECT_LT(t.prefactor_deviation, 1e-3);
}

TEST_F(Cusp6, StrictInequalityWithLambda) {
  const auto rep = quotient_sequence(*pe_, *rows_, 1.0);
  ASSERT_TRUE(rep.first_strict_j.has_value());
  for (std::size_t j = *rep.first_strict_j; j < rep.Q.size(); ++j) {
    EXPECT_LT(rep.Q[j], rep.bound);
    EXPECT_GT(rep.margin[j], rep.margin_error[j]);
  }
  const auto usable = rep.usable_rows();
  ASSERT_GE(usable.size(), 2u);
  for (std::size_t k = usable.size() - 2; k < usable.size(); ++k) {
    EXPECT_GT(rep.margin_ratio[usable[k]], 0.9);
    EXPECT_LT(rep.margin_ratio[usable[k]], 1.1);
  }
}

TEST_F(Cusp6, NoStrictInequalityWithoutLambda) {
  const auto rep = quotient_sequence(*pe_, *rows_, 0.0);
  EXPECT_FALSE(rep.first_strict_j.has_value());
  for (double m : rep.margin) EXPECT_LE(m, 0.0);
}

TEST_F(Cusp6, MarginGrowsWithLambda) {
  const auto lo = quotient_sequence(*pe_, *rows_, 0.5);
  const auto hi = quotient_sequence(*pe_, *rows_, 1.0);
  for (std::size_t j = 0; j < lo.Q.size(); ++j) EXPECT_LT(hi.Q[j], lo.Q[j]);
  EXPECT_THROW(quotient_sequence(*pe_, *rows_, -1.0), ParameterError);
}

TEST(Prepare, BetaOutsideWindowNamesInequality) {
  auto e = cusp6();
  e.beta = 2.6;
  try {
    prepare(e);
    FAIL() << "expected ParameterError";
  } catch (const ParameterError& err) {
    EXPECT_NE(std::string(err.what()).find("p*beta < sigma"), std::string::npos) << err.what();
  }
  e.beta.reset();
  EXPECT_NEAR(prepare(e).beta, 2.45, 1e-12);
}

TEST(LinearCase, EmbeddedScalarAgreement) {
  Experiment e;
  e.n = 5;
  e.alpha = 1.1;
  const double s = 0.01;
  e.coefficients = MatrixCoefficients{s * Matrix::Identity(5, 5), 1e-2, 7.0};
  e.j_max = 6;
  const auto pe = prepare(e);
  const auto rows = evaluate_sequence(pe);
  const auto rep = quotient_sequence(pe, rows, 1.0);
  const auto emb = embedded_scalar_quotients(pe, rows, 1.0);
  for (std::size_t j = 0; j < rows.size(); ++j)
    EXPECT_LT(std::abs(emb[j] - rep.Q[j]) / rep.Q[j], 1e-8) << "j=" << j;
}

TEST(Sweep, LabelsRegions) {
  auto base = cusp6();
  base.j_max = 6;
  const auto rows = inadmissibility_sweep(base, 1.0, {1.2, 1.25, 1.3});
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0].region, "theorem");
  EXPECT_TRUE(rows[0].evaluated);
  EXPECT_EQ(rows[1].region, "no-theorem region");
  EXPECT_EQ(rows[1].note, "empty beta interval");
  EXPECT_FALSE(rows[1].evaluated);
  EXPECT_EQ(rows[2].region, "no-theorem region");
  EXPECT_FALSE(rows[2].orders.lambda_dominates());
}

TEST(Determinism, JobsDoNotChangeResults) {
  auto e = cusp6();
  e.j_max = 5;
  e.jobs = 1;
  const auto a = evaluate_sequence(prepare(e));
  e.jobs = 4;
  const auto b = evaluate_sequence(prepare(e));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    EXPECT_EQ(a[j].integrals.I1, b[j].integrals.I1);
    EXPECT_EQ(a[j].integrals.d2, b[j].integrals.d2);
    EXPECT_EQ(a[j].integrals.I4.at(5.0), b[j].integrals.I4.at(5.0));
  }
}

}  // namespace

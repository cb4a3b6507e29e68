#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "bnlab/singular_geometry.hpp"

namespace {

using namespace bnlab;

CuspDomain cusp(int n, double alpha, double kappa = 1.0) {
  return build_domain(make_setup(n, 2.0), alpha, kappa, 1.0, 0.5);
}

TEST(CuspDomain, Membership) {
  const auto dom = cusp(5, 1.0);
  EXPECT_TRUE(dom.contains(dom.axis_point(0.5)));
  EXPECT_FALSE(dom.contains(dom.tip()));
  Vector edge = dom.axis_point(0.5);
  edge[0] = dom.kappa * std::pow(0.5, dom.alpha);
  EXPECT_FALSE(dom.contains(edge));
  EXPECT_DOUBLE_EQ(dom.lateral_gap(edge), 0.0);
  Vector inside = edge;
  inside[0] *= 1.0 - 1e-9;
  EXPECT_TRUE(dom.contains(inside));
}

TEST(CuspDomain, InvalidParameters) {
  const auto s = make_setup(5, 2.0);
  EXPECT_THROW(build_domain(s, 0.9, 1.0, 1.0, 0.5), GeometryError);
  EXPECT_THROW(build_domain(s, 1.0, 0.0, 1.0, 0.5), GeometryError);
  EXPECT_THROW(build_domain(s, 1.0, 1.0, -1.0, 0.5), GeometryError);
  EXPECT_THROW(build_domain(s, 1.0, 1.0, 1.0, 0.0), GeometryError);
}

TEST(CuspDomain, LateralDistanceMatchesBruteForce) {
  for (double alpha : {1.0, 1.2, 1.5, 2.0}) {
    const auto dom = cusp(3, alpha);
    for (double t : {0.5, 0.1, 0.01}) {
      double best = std::numeric_limits<double>::infinity();
      for (int i = 0; i <= 200000; ++i) {
        const double h = t * i / 200000.0;
        best = std::min(best, std::hypot(dom.kappa * std::pow(h, alpha), h - t));
      }
      EXPECT_NEAR(dom.lateral_distance(t), best, 1e-7 * t) << "alpha=" << alpha << " t=" << t;
      EXPECT_LE(dom.lateral_distance(t), best);
    }
  }
}

TEST(WitnessSequence, ConeContainsAllBalls) {
  const auto seq = witness_sequence(cusp(5, 1.0), 0.3, 0.1, 0.5, 10);
  ASSERT_EQ(seq.size(), 11u);
  for (std::size_t j = 0; j < seq.size(); ++j) {
    EXPECT_NEAR(seq.radii[j], 0.1 * std::pow(0.5, j), 1e-16);
    EXPECT_LE(seq.ball_radius(j), seq.clearance[j]);
    if (j > 0) {
      EXPECT_LT(seq.radii[j], seq.radii[j - 1]);
    }
  }
}

TEST(WitnessSequence, WideBallFailsAtFirstIndex) {
  const auto dom = cusp(5, 1.0);
  try {
    witness_sequence(dom, 2.0 * dom.kappa, 0.1, 0.5, 10);
    FAIL() << "expected WitnessError";
  } catch (const WitnessError& e) {
    EXPECT_EQ(e.failing_index(), 0);
  }
}

TEST(WitnessSequence, CuspOrdersTwoAndOneAndAHalf) {
  EXPECT_NO_THROW(witness_sequence(cusp(5, 2.0), 0.3, 0.1, 0.5, 10));
  EXPECT_NO_THROW(witness_sequence(cusp(5, 1.5), 0.5, 0.1, 0.6, 15));
}

TEST(WitnessSequence, BallPointsStayInside) {
  // Points on the witness sphere, shrunk slightly, belong to Omega.
  const auto dom = cusp(4, 1.5);
  const auto seq = witness_sequence(dom, 0.5, 0.1, 0.6, 8);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (std::size_t j = 0; j < seq.size(); ++j)
    for (int k = 0; k < 200; ++k) {
      Vector d(4);
      for (int i = 0; i < 4; ++i) d[i] = g(rng);
      const Vector x = seq.points[j] + (1.0 - 1e-9) * seq.ball_radius(j) * d.normalized();
      EXPECT_TRUE(dom.contains(x)) << "j=" << j;
    }
}

TEST(Hypotheses, ScalarPrototypeAndViolations) {
  const auto dom = cusp(5, 1.2);
  const auto field = make_scalar_field(1.0, 0.5, 3.0, dom.tip());
  EXPECT_TRUE(check_h2(field, dom, 500));
  const auto doubled = [&](const Vector& x) {
    return 1.0 + 2.0 * 0.5 * std::pow(x.norm(), 3.0);
  };
  EXPECT_FALSE(check_h2(doubled, dom.tip(), {0.5, 3.0}, dom, 500));
  // Higher power on a domain of diameter < 1 stays under the bound.
  const auto small = build_domain(make_setup(5, 2.0), 1.2, 0.2, 0.5, 0.1);
  ASSERT_LT(small.diameter_bound(), 1.0);
  const auto higher = [&](const Vector& x) { return 1.0 + 0.5 * std::pow(x.norm(), 4.0); };
  EXPECT_TRUE(check_h2(higher, small.tip(), {0.5, 3.0}, small, 500));
}

TEST(Hypotheses, MatrixPrototypeAndViolations) {
  const auto dom = cusp(5, 1.2);
  const Matrix A0 = Matrix::Identity(5, 5);
  EXPECT_TRUE(check_h1(make_matrix_field(A0, 1.0, 2.5, dom.tip()), dom, 500));
  const auto doubled = [&](const Vector& x) -> Matrix {
    return A0 + 2.0 * std::pow(x.norm(), 2.5) * Matrix::Identity(5, 5);
  };
  EXPECT_FALSE(check_h1(doubled, dom.tip(), {1.0, 2.5}, dom, 500));
  Matrix bad = A0;
  bad(0, 0) = -1.0;
  EXPECT_THROW(make_matrix_field(bad, 1.0, 2.5, dom.tip()), NotPositiveDefinite);
}

TEST(Hypotheses, DeterminantMinimalAtTip) {
  const auto dom = cusp(5, 1.2);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Matrix B(5, 5);
  for (int i = 0; i < 25; ++i) B(i / 5, i % 5) = u(rng);
  const Matrix A0 = B * B.transpose() + 0.5 * Matrix::Identity(5, 5);
  const auto field = make_matrix_field(A0, 0.7, 3.0, dom.tip());
  ASSERT_TRUE(check_h1(field, dom, 300));
  for (const auto& x : sample_domain(dom, 300))
    EXPECT_GE(field(x).determinant(), field.min_determinant() * (1.0 - 1e-12));
}

TEST(LinearReduction, IdentityAndDiagonal) {
  const auto id = reduce_linear(Matrix::Identity(5, 5));
  EXPECT_TRUE(id.P.isApprox(Matrix::Identity(5, 5), 1e-14));
  EXPECT_TRUE(id.D.isApprox(Matrix::Identity(5, 5), 1e-14));
  Vector d(5);
  d << 4, 1, 1, 1, 1;
  const auto red = reduce_linear(d.asDiagonal());
  Vector expected(5);
  expected << 0.5, 1, 1, 1, 1;
  EXPECT_TRUE(red.D.diagonal().isApprox(expected, 1e-14));
  EXPECT_TRUE(red.P.isApprox(Matrix::Identity(5, 5), 1e-14));
}

TEST(LinearReduction, RandomSpdNormalizes) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    Matrix B(5, 5);
    for (int i = 0; i < 25; ++i) B(i / 5, i % 5) = u(rng);
    const Matrix A0 = B * B.transpose() + 0.1 * Matrix::Identity(5, 5);
    const auto red = reduce_linear(A0);
    const Matrix diag = red.P * A0 * red.P.transpose();
    EXPECT_LT((diag - Matrix(diag.diagonal().asDiagonal())).cwiseAbs().maxCoeff(), 1e-10);
    const Matrix unit = red.D * red.P * A0 * red.P.transpose() * red.D;
    EXPECT_LT((unit - Matrix::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_TRUE((red.P * red.P.transpose()).isApprox(Matrix::Identity(5, 5), 1e-12));
    EXPECT_NEAR(red.determinant, A0.determinant(), 1e-10 * A0.determinant());
  }
  EXPECT_THROW(reduce_linear(-Matrix::Identity(3, 3)), NotPositiveDefinite);
}

TEST(LinearReduction, ScaledIdentityConstants) {
  const double s = 0.3, C0 = 2.0, gamma = 5.0;
  const auto red = reduce_linear(s * Matrix::Identity(6, 6));
  EXPECT_NEAR(red.energy_factor(), s, 1e-15);
  EXPECT_NEAR(red.C2, s, 1e-15);
  EXPECT_NEAR(red.C1(C0, gamma), C0 * std::pow(s, gamma / 2.0), 1e-14);
}

TEST(LinearReduction, TransformedWitnessKeepsOrder) {
  const auto dom = cusp(5, 1.2);
  const auto seq = witness_sequence(dom, 0.5, 0.1, 0.6, 10);
  Vector d(5);
  d << 4, 2, 1, 1, 0.5;
  const auto red = reduce_linear(d.asDiagonal());
  const auto tw = transform_witness(seq, red);
  // The image of B(x_j, r_j) contains B(y_j, lambda_max^{-1/2} r_j) and
  // eps'_j <= lambda_min^{-1/2} eps_j, so delta' eps'^alpha fits.
  for (std::size_t j = 0; j < seq.size(); ++j) {
    const double inner = seq.ball_radius(j) / std::sqrt(red.eigenvalues.maxCoeff());
    EXPECT_LE(tw.delta * std::pow(tw.radii[j], dom.alpha), inner * (1.0 + 1e-12));
    EXPECT_NEAR(tw.radii[j], seq.radii[j] / std::sqrt(red.eigenvalues[4]), 1e-14);
  }
}

}  // namespace

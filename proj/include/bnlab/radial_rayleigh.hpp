#pragma once

// Direct minimization of the radial Sobolev quotient over discretized
// profiles. Independent of any closed form: it only knows the functional.
//
// With u(r) = r^{-(n-p)/p} V(log r) the quotient becomes translation
// invariant in s = log r,
//
//     Q[u] = |S^{n-1}|^{p/n} int |V' - kV|^p ds / (int |V|^{p*} ds)^{p/p*},
//
// k = (n-p)/p. V is discretized by continuous piecewise-linear elements on a
// uniform s-grid with V = 0 at both ends; the discrete minimum is an upper
// bound converging like h^2, and is Richardson-extrapolated over three
// refinements.

#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <ceres/first_order_function.h>
#include <ceres/gradient_problem.h>
#include <ceres/gradient_problem_solver.h>

#include "bnlab/errors.hpp"
#include "bnlab/quadrature.hpp"

namespace bnlab {

struct RadialQuotientLevel {
  double step = 0.0;
  double quotient = 0.0;
  int iterations = 0;
};

struct RadialQuotientResult {
  std::vector<RadialQuotientLevel> levels;
  double extrapolated = 0.0;
  double extrapolation_error = 0.0;  // |last two Richardson columns|
};

namespace detail {

class DiscreteQuotient final : public ceres::FirstOrderFunction {
 public:
  DiscreteQuotient(int n, double p, double s_left, double step, int nodes)
      : n_(n), p_(p), p_star_(n * p / (n - p)), k_((n - p) / p),
        s_left_(s_left), h_(step), nodes_(nodes) {}

  int NumParameters() const override { return nodes_ - 2; }

  // Objective is log A - (p/p*) log B, invariant under V -> cV.
  bool Evaluate(const double* v, double* cost, double* gradient) const override {
    const auto& xi = gauss_nodes();
    const auto& wt = gauss_weights();
    quad::CompensatedSum a_sum, b_sum;
    if (gradient) {
      da_.assign(nodes_, 0.0);
      db_.assign(nodes_, 0.0);
    }
    for (int e = 0; e + 1 < nodes_; ++e) {
      const double va = value_at(v, e);
      const double vb = value_at(v, e + 1);
      const double slope = (vb - va) / h_;
      for (std::size_t g = 0; g < xi.size(); ++g) {
        const double t = xi[g];
        const double w = wt[g] * h_;
        const double vv = va * (1.0 - t) + vb * t;
        const double ww = slope - k_ * vv;
        const double aw = std::abs(ww);
        const double av = std::abs(vv);
        a_sum.add(w * std::pow(aw, p_));
        b_sum.add(w * std::pow(av, p_star_));
        if (gradient) {
          const double ga = w * p_ * std::pow(aw, p_ - 1.0) * (ww < 0 ? -1.0 : 1.0);
          da_[e] += ga * (-1.0 / h_ - k_ * (1.0 - t));
          da_[e + 1] += ga * (1.0 / h_ - k_ * t);
          const double gb = w * p_star_ * std::pow(av, p_star_ - 1.0) * (vv < 0 ? -1.0 : 1.0);
          db_[e] += gb * (1.0 - t);
          db_[e + 1] += gb * t;
        }
      }
    }
    const double a = a_sum.value();
    const double b = b_sum.value();
    if (!(a > 0.0) || !(b > 0.0)) return false;
    *cost = std::log(a) - (p_ / p_star_) * std::log(b);
    if (gradient) {
      for (int i = 1; i + 1 < nodes_; ++i)
        gradient[i - 1] = da_[i] / a - (p_ / p_star_) * db_[i] / b;
    }
    return true;
  }

  double quotient(const double* v) const {
    double cost = 0.0;
    Evaluate(v, &cost, nullptr);
    return std::pow(quad::sphere_area(n_), p_ / n_) * std::exp(cost);
  }

  double node(int i) const { return s_left_ + i * h_; }

 private:
  double value_at(const double* v, int i) const {
    return (i == 0 || i == nodes_ - 1) ? 0.0 : v[i - 1];
  }

  static const std::vector<double>& gauss_nodes() {
    static const std::vector<double> xi = [] {
      std::vector<double> out;
      const auto& abscissa = boost::math::quadrature::gauss<double, 6>::abscissa();
      for (double x : abscissa) {
        out.push_back(0.5 * (1.0 - x));
        if (x != 0.0) out.push_back(0.5 * (1.0 + x));
      }
      return out;
    }();
    return xi;
  }
  static const std::vector<double>& gauss_weights() {
    static const std::vector<double> wt = [] {
      std::vector<double> out;
      const auto& abscissa = boost::math::quadrature::gauss<double, 6>::abscissa();
      const auto& weights = boost::math::quadrature::gauss<double, 6>::weights();
      for (std::size_t i = 0; i < abscissa.size(); ++i) {
        out.push_back(0.5 * weights[i]);
        if (abscissa[i] != 0.0) out.push_back(0.5 * weights[i]);
      }
      return out;
    }();
    return wt;
  }

  int n_;
  double p_, p_star_, k_, s_left_, h_;
  int nodes_;
  mutable std::vector<double> da_, db_;
};

inline RadialQuotientLevel minimize_level(int n, double p, double s_left, double s_right,
                                          double step, std::vector<double>& profile) {
  const int nodes = static_cast<int>(std::lround((s_right - s_left) / step)) + 1;
  auto* fn = new DiscreteQuotient(n, p, s_left, step, nodes);
  ceres::GradientProblem problem(fn);
  ceres::GradientProblemSolver::Options options;
  options.line_search_direction_type = ceres::LBFGS;
  options.max_lbfgs_rank = 30;
  options.max_num_iterations = 20000;
  options.function_tolerance = 1e-16;
  options.gradient_tolerance = 1e-13;
  options.parameter_tolerance = 1e-14;
  options.logging_type = ceres::SILENT;
  ceres::GradientProblemSolver::Summary summary;
  ceres::Solve(options, problem, profile.data(), &summary);
  if (!summary.IsSolutionUsable())
    throw ConvergenceError("radial quotient minimization failed: " + summary.message);
  return {step, fn->quotient(profile.data()),
          static_cast<int>(summary.iterations.size())};
}

}  // namespace detail

/// Minimizes the discretized radial quotient at three step sizes and
/// extrapolates to zero step. The starting profile is a sech bump, unrelated
/// to the extremal.
inline RadialQuotientResult minimize_radial_quotient(int n, double p, double coarse_step = 0.04,
                                                     int refinements = 3) {
  const double k = (n - p) / p;
  const double left_rate = k;                    // V ~ e^{k s} as s -> -inf
  const double right_rate = (n - p) / (p * (p - 1.0));  // V ~ e^{-rate s} as s -> +inf
  constexpr double kDecades = 20.0;
  const double s_left = -std::ceil(kDecades / (std::min(p, 2.0) * left_rate));
  const double s_right = std::ceil(kDecades / (std::min(p, 2.0) * right_rate));

  RadialQuotientResult out;
  double step = coarse_step;
  int nodes = static_cast<int>(std::lround((s_right - s_left) / step)) + 1;
  std::vector<double> profile(nodes - 2);
  for (int i = 1; i + 1 < nodes; ++i) {
    const double s = s_left + i * step;
    profile[i - 1] = 1.0 / std::cosh(0.5 * s);
  }
  for (int level = 0; level < refinements; ++level) {
    if (level > 0) {
      // Prolongate to the halved grid.
      const int fine_nodes = 2 * (nodes - 1) + 1;
      std::vector<double> fine(fine_nodes - 2);
      auto coarse = [&](int i) { return (i == 0 || i == nodes - 1) ? 0.0 : profile[i - 1]; };
      for (int i = 1; i + 1 < fine_nodes; ++i)
        fine[i - 1] = (i % 2 == 0) ? coarse(i / 2) : 0.5 * (coarse(i / 2) + coarse(i / 2 + 1));
      profile = std::move(fine);
      nodes = fine_nodes;
      step *= 0.5;
    }
    out.levels.push_back(detail::minimize_level(n, p, s_left, s_right, step, profile));
  }
  // Richardson tableau in h^2.
  std::vector<double> col;
  for (const auto& l : out.levels) col.push_back(l.quotient);
  double last_gap = 0.0;
  for (int order = 1; col.size() > 1; ++order) {
    const double factor = std::pow(4.0, order);
    std::vector<double> next;
    for (std::size_t i = 0; i + 1 < col.size(); ++i)
      next.push_back((factor * col[i + 1] - col[i]) / (factor - 1.0));
    if (next.size() == 1) last_gap = std::abs(next[0] - col.back());
    col = std::move(next);
  }
  out.extrapolated = col.front();
  out.extrapolation_error = last_gap;
  return out;
}

}  // namespace bnlab

#include "ganfp/certify.hpp"
#include "ganfp/error.hpp"
#include "ganfp/iterate.hpp"
#include "ganfp/problems.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace ganfp;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

Matrix diag(std::initializer_list<double> d) { return vec(d).asDiagonal(); }

SamplingPlan plan(std::size_t n, std::uint64_t seed, std::vector<double> scales) {
  SamplingPlan p;
  p.n_pairs = n;
  p.seed = seed;
  p.radius_scales = std::move(scales);
  return p;
}

void check_gradient_bounds(const ProblemSpec& p, std::uint64_t seed) {
  for (std::uint64_t i = 0; i < 1000; ++i) {
    const Vector x = oracle::gaussian_vector(p.n, seed + 2 * i);
    const Vector y = oracle::gaussian_vector(p.n, seed + 2 * i + 1);
    const double g = (p.grad_f(x) - p.grad_f(y)).norm();
    const double d = (x - y).norm();
    EXPECT_LE(g, p.L * d + 1e-8 * p.L * d);
    if (p.L2_lower) EXPECT_GE(g, *p.L2_lower * d - 1e-8 * p.L * d);
  }
}

}  // namespace

TEST(LeastSquares, HandInstances) {
  const auto p = least_squares_problem(Matrix::Identity(2, 2), vec({3, 4}));
  EXPECT_TRUE(p.exact_solution->isApprox(vec({3, 4}), 1e-14));
  EXPECT_NEAR(p.L, 1.0, 1e-12);

  const auto q = least_squares_problem(diag({1, 2}), vec({1, 4}));
  EXPECT_TRUE(q.exact_solution->isApprox(vec({1, 2}), 1e-14));
  EXPECT_NEAR(q.L, 4.0, 1e-9);
  EXPECT_NEAR(*q.L2_lower, 1.0, 1e-9);
}

TEST(LeastSquares, RandomNormalEquations) {
  const Matrix A = oracle::gaussian(30, 10, 1);
  const Vector b = oracle::gaussian_vector(30, 2);
  const auto p = least_squares_problem(A, b);
  const Vector r = A.transpose() * (A * *p.exact_solution - b);
  EXPECT_LE(r.norm(), 1e-8 * (A.transpose() * b).norm());
  const Vector ev = oracle::sym_eigenvalues(A.transpose() * A);
  EXPECT_NEAR(p.L, ev.maxCoeff(), 1e-8 * ev.maxCoeff());
  EXPECT_NEAR(*p.L2_lower, ev.minCoeff(), 1e-8 * ev.minCoeff());
  check_gradient_bounds(p, 100);
}

TEST(LeastSquares, RejectsRankDeficient) {
  Matrix A = oracle::gaussian(6, 3, 4);
  A.col(2) = A.col(0) + A.col(1);
  EXPECT_THROW(least_squares_problem(A, Vector::Zero(6)), DomainError);
  EXPECT_THROW(least_squares_problem(Matrix::Zero(2, 3), Vector::Zero(2)), DomainError);
  EXPECT_THROW(least_squares_problem(Matrix::Identity(2, 2), Vector::Zero(3)),
               DimensionMismatch);
}

TEST(Separable, ClosedForm) {
  EXPECT_EQ(*separable_smooth_l1_problem(vec({2, 3}), vec({1, -2}), 0.0).exact_solution,
            vec({1, -2}));
  EXPECT_EQ(*separable_smooth_l1_problem(vec({1}), vec({5}), 1.0).exact_solution, vec({4}));
  EXPECT_EQ(*separable_smooth_l1_problem(vec({1}), vec({0.5}), 1.0).exact_solution, vec({0}));
  EXPECT_EQ(*separable_smooth_l1_problem(vec({4}), vec({-3}), 2.0).exact_solution,
            vec({-2.5}));
  EXPECT_THROW(separable_smooth_l1_problem(vec({0}), vec({1}), 1.0), DomainError);
}

TEST(Separable, ClosedFormMatchesGridSearch) {
  const Vector c = oracle::gaussian_vector(6, 5).cwiseAbs() + Vector::Constant(6, 0.2);
  const Vector b = oracle::gaussian_vector(6, 6) * 2.0;
  const double lam = 0.7;
  const auto p = separable_smooth_l1_problem(c, b, lam);
  for (Eigen::Index i = 0; i < 6; ++i) {
    const double g = oracle::grid_argmin_1d(
        [&](double t) { return 0.5 * c(i) * (t - b(i)) * (t - b(i)) + lam * std::abs(t); }, -20,
        20, 1e-4);
    EXPECT_NEAR((*p.exact_solution)(i), g, 1e-4);
  }
  check_gradient_bounds(p, 200);
}

TEST(Analysis, DimensionsChecked) {
  EXPECT_THROW(analysis_l1_problem(Matrix::Identity(3, 3), Vector::Zero(3),
                                   Matrix::Identity(2, 2), 1.0),
               DimensionMismatch);
  EXPECT_THROW(analysis_l1_problem(Matrix::Identity(3, 3), Vector::Zero(2),
                                   Matrix::Identity(3, 3), 1.0),
               DimensionMismatch);
  const auto p = analysis_l1_problem(Matrix::Identity(3, 3), Vector::Zero(3),
                                     Matrix::Identity(3, 3), 1.0);
  EXPECT_FALSE(p.exact_solution);
  EXPECT_NEAR(p.B_norm, 1.0, 1e-10);
}

TEST(StepSizes, HandValues) {
  EXPECT_DOUBLE_EQ(step_size_bounds(2.0, 1.0).beta_max, 1.0);
  const auto b = step_size_bounds(2.0, 1.0, 0.5);
  EXPECT_DOUBLE_EQ(*b.eta_max, 0.5);
  EXPECT_TRUE(*b.interior_condition);
  for (double beta : {0.1, 0.5, 0.9}) {
    EXPECT_NEAR(*step_size_bounds(2.0, 0.0, beta).eta_max, 1.0, 1e-15);
  }
  EXPECT_THROW(step_size_bounds(2.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(step_size_bounds(0.0, 1.0), DomainError);
}

TEST(StepSizes, InteriorPointsSatisfyCondition) {
  for (double L : {0.5, 1.0, 7.0}) {
    for (double Bn : {0.0, 0.3, 2.0}) {
      for (double frac : {0.05, 0.5, 0.95}) {
        const double beta = frac * 2.0 / L;
        const double eta_max = *step_size_bounds(L, Bn, beta).eta_max;
        for (double ef : {0.1, 0.5, 0.99}) {
          EXPECT_TRUE(primal_dual_condition(L, Bn, beta, ef * eta_max))
              << L << " " << Bn << " " << beta;
        }
      }
    }
  }
}

TEST(ReferenceSolution, Passthrough) {
  const auto p = least_squares_problem(diag({1, 2}), vec({1, 4}));
  const auto r = reference_solution(p, 1e-8);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.x, *p.exact_solution);
  const auto s = separable_smooth_l1_problem(vec({1}), vec({5}), 1.0);
  EXPECT_EQ(reference_solution(s, 1e-8).x, vec({4}));
}

TEST(ReferenceSolution, AnalysisIdentityMatchesSeparable) {
  const Vector b = oracle::gaussian_vector(4, 12) * 3.0;
  const double lam = 0.6;
  const auto p = analysis_l1_problem(Matrix::Identity(4, 4), b, Matrix::Identity(4, 4), lam);
  const auto r = reference_solution(p, 1e-8);
  EXPECT_FALSE(r.exact);
  const auto s = separable_smooth_l1_problem(Vector::Ones(4), b, lam);
  EXPECT_LE((r.x - *s.exact_solution).lpNorm<Eigen::Infinity>(), 1e-6);
}

TEST(ReferenceSolution, DifferenceOperatorMatchesChainGrid) {
  const Vector b = (Vector(5) << 1.0, 1.2, -0.5, 2.0, 1.8).finished();
  const double lam = 0.5;
  Matrix D = Matrix::Zero(4, 5);
  for (int i = 0; i < 4; ++i) {
    D(i, i) = -1.0;
    D(i, i + 1) = 1.0;
  }
  const auto p = analysis_l1_problem(Matrix::Identity(5, 5), b, D, lam);
  const auto r = reference_solution(p, 1e-8);
  const double box = 10.0 * b.lpNorm<Eigen::Infinity>();
  const Vector grid = oracle::chain_tv_grid_min(b, lam, -box, box, 1e-3);
  EXPECT_LE((r.x - grid).lpNorm<Eigen::Infinity>(), 2e-3);
}

TEST(Operators, T1HolderRegular) {
  const Matrix A = oracle::gaussian(30, 10, 21);
  const auto p = least_squares_problem(A, oracle::gaussian_vector(30, 22));
  const double beta = default_beta(p);
  const Operator T1 = make_T1(p, beta);
  ASSERT_TRUE(T1.fixed_point_hint());
  const auto cert = certify(T1, Property::HolderRegular, {1.0, 1.0 / (beta * *p.L2_lower), {}},
                            NormSpec::l2(), plan(500, 1, {0.1, 1.0, 10.0, 1e3}));
  EXPECT_TRUE(cert.passed()) << cert.min_slack;
}

TEST(Operators, T1ScalarGanExponentOne) {
  for (double frac : {0.2, 0.5, 0.75, 0.95}) {
    const double L = 3.0;
    const double beta = frac * 2.0 / L;
    const auto p = least_squares_problem(Matrix::Constant(1, 1, std::sqrt(L)), vec({1.0}));
    const double mu = std::min(0.5, 2.0 / (beta * L) - 1.0);
    const auto cert = certify(make_T1(p, beta), Property::GAN, {1.0, mu, {}}, NormSpec::l2(),
                              plan(500, 2, {0.1, 1.0, 10.0, 1e3}));
    EXPECT_TRUE(cert.passed()) << frac << " " << cert.min_slack;
  }
}

TEST(Operators, T2SeparableGanInL1) {
  const Vector c = oracle::gaussian_vector(8, 31).cwiseAbs() + Vector::Constant(8, 0.5);
  const auto p = separable_smooth_l1_problem(c, oracle::gaussian_vector(8, 32), 0.4);
  const Operator T2 = make_T2(p, default_beta(p));
  const auto pl = plan(500, 3, {0.1, 1.0, 10.0, 1e3});
  const double mu = estimate_mu(T2, 1.0, NormSpec::l1(), pl);
  EXPECT_GT(mu, 0.0);
  EXPECT_TRUE(certify(T2, Property::GAN, {1.0, mu - 1e-6, {}}, NormSpec::l1(),
                      plan(500, 4, {0.1, 1.0, 10.0, 1e3}))
                  .passed());
}

TEST(Operators, AveragedUnderStepBounds) {
  const Matrix A = oracle::gaussian(12, 6, 41);
  const Vector b = oracle::gaussian_vector(12, 42);
  const auto ls = least_squares_problem(A, b);
  const auto lasso = lasso_problem(A, b, 0.3);
  const double beta = 1.5 / ls.L;
  const auto pl = plan(400, 5, {0.1, 1.0, 10.0});
  for (const Operator& T : {make_T1(ls, beta), make_T2(lasso, beta)}) {
    const double mu = estimate_mu(T, 2.0, NormSpec::l2(), pl);
    EXPECT_GT(mu, 0.0) << T.label();
    EXPECT_TRUE(certify(T, Property::GAN, {2.0, 0.5 * mu, {}}, NormSpec::l2(),
                        plan(400, 6, {0.1, 1.0, 10.0}))
                    .passed());
  }
}

TEST(Operators, StepBoundBoundary) {
  const double L = 4.0;  // A = 2 keeps the products exact
  const auto p = least_squares_problem(Matrix::Constant(1, 1, 2.0), vec({0.0}));
  const Operator bad = make_T1(p, 3.0 / L);
  EXPECT_FALSE(certify(bad, Property::Nonexpansive, {}, NormSpec::l2(), SamplingPlan{}).passed());
  EXPECT_EQ(picard(bad, vec({1.0}), 1000, 1e-12).stop_reason, StopReason::Diverged);
  const auto good = picard(make_T1(p, 1.0 / L), vec({1.0}), 1000, 1e-12);
  EXPECT_EQ(good.x_final, vec({0.0}));
  EXPECT_EQ(good.k_final, 2u);  // one step lands on 0, the next confirms it
}

TEST(Operators, T3NeedsAnalysisProblem) {
  const auto p = least_squares_problem(Matrix::Identity(2, 2), vec({1, 1}));
  EXPECT_THROW(make_T3(p, 0.5, 0.5), DomainError);
  EXPECT_THROW(make_T2(p, 0.5), DomainError);
}

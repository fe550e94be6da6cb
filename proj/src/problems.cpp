#include "ganfp/problems.hpp"

#include "ganfp/error.hpp"
#include "ganfp/iterate.hpp"

#include <cmath>

namespace ganfp {

namespace {

constexpr double kRankTol = 1e-10;
constexpr std::size_t kReferenceMaxIter = 1'000'000;

}  // namespace

std::string to_string(ProblemKind k) {
  switch (k) {
    case ProblemKind::LeastSquares:
      return "least_squares";
    case ProblemKind::Lasso:
      return "lasso";
    case ProblemKind::SeparableSmoothL1:
      return "separable_l1";
    case ProblemKind::AnalysisL1PrimalDual:
      return "analysis_l1";
  }
  return "unknown";
}

ProblemSpec least_squares_problem(const Matrix& A, const Vector& b) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch("least_squares_problem b",
                            static_cast<std::size_t>(A.rows()),
                            static_cast<std::size_t>(b.size()));
  }
  if (A.rows() < A.cols()) {
    throw DomainError("least_squares_problem: A has fewer rows than columns "
                      "and cannot have full column rank");
  }
  const Matrix normal = A.transpose() * A;
  ProblemSpec p;
  p.kind = ProblemKind::LeastSquares;
  p.n = A.cols();
  const double sigma_max = spectral_norm(A).value;
  p.L = sigma_max * sigma_max;
  double lambda_min = 0.0;
  try {
    lambda_min = smallest_eigenvalue_spd(normal).value;
  } catch (const NotPositiveDefinite&) {
    throw DomainError("least_squares_problem: A is rank deficient");
  }
  if (!(std::sqrt(lambda_min) > kRankTol * sigma_max)) {
    throw DomainError("least_squares_problem: A is numerically rank deficient");
  }
  p.L2_lower = lambda_min;
  p.exact_solution = normal.llt().solve(A.transpose() * b);
  p.grad_f = [A, b](const Vector& x) -> Vector {
    return A.transpose() * (A * x - b);
  };
  p.objective = [A, b](const Vector& x) { return 0.5 * (A * x - b).squaredNorm(); };
  return p;
}

ProblemSpec lasso_problem(const Matrix& A, const Vector& b, double lambda) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch("lasso_problem b", static_cast<std::size_t>(A.rows()),
                            static_cast<std::size_t>(b.size()));
  }
  if (lambda < 0.0) throw DomainError("lasso_problem: lambda must be >= 0");
  ProblemSpec p;
  p.kind = ProblemKind::Lasso;
  p.n = A.cols();
  p.lambda = lambda;
  const double sigma = spectral_norm(A).value;
  p.L = sigma * sigma;
  if (!(p.L > 0.0)) throw DomainError("lasso_problem: A is zero");
  p.prox_g = prox_l1(lambda);
  p.grad_f = [A, b](const Vector& x) -> Vector {
    return A.transpose() * (A * x - b);
  };
  p.objective = [A, b, lambda](const Vector& x) {
    return 0.5 * (A * x - b).squaredNorm() + lambda * x.lpNorm<1>();
  };
  return p;
}

ProblemSpec separable_smooth_l1_problem(const Vector& coeffs, const Vector& b,
                                        double lambda) {
  if (coeffs.size() != b.size()) {
    throw DimensionMismatch("separable_smooth_l1_problem b",
                            static_cast<std::size_t>(coeffs.size()),
                            static_cast<std::size_t>(b.size()));
  }
  if (coeffs.size() == 0 || !(coeffs.minCoeff() > 0.0)) {
    throw DomainError("separable_smooth_l1_problem: coeffs must be positive");
  }
  if (lambda < 0.0) {
    throw DomainError("separable_smooth_l1_problem: lambda must be >= 0");
  }
  ProblemSpec p;
  p.kind = ProblemKind::SeparableSmoothL1;
  p.n = coeffs.size();
  p.lambda = lambda;
  p.L = coeffs.maxCoeff();
  p.L2_lower = coeffs.minCoeff();
  p.prox_g = prox_l1(lambda);
  p.grad_f = [coeffs, b](const Vector& x) -> Vector {
    return coeffs.cwiseProduct(x - b);
  };
  p.objective = [coeffs, b, lambda](const Vector& x) {
    return 0.5 * coeffs.dot((x - b).cwiseAbs2()) + lambda * x.lpNorm<1>();
  };
  Vector x(p.n);
  for (Eigen::Index i = 0; i < p.n; ++i) {
    const double shrink = std::min(std::abs(b(i)), lambda / coeffs(i));
    x(i) = b(i) - std::copysign(shrink, b(i));
  }
  p.exact_solution = x;
  return p;
}

ProblemSpec analysis_l1_problem(const Matrix& A, const Vector& b,
                                const Matrix& B, double lambda) {
  if (A.rows() != b.size()) {
    throw DimensionMismatch("analysis_l1_problem b",
                            static_cast<std::size_t>(A.rows()),
                            static_cast<std::size_t>(b.size()));
  }
  if (B.cols() != A.cols()) {
    throw DimensionMismatch("analysis_l1_problem B columns",
                            static_cast<std::size_t>(A.cols()),
                            static_cast<std::size_t>(B.cols()));
  }
  if (B.rows() == 0) throw DomainError("analysis_l1_problem: B has no rows");
  if (lambda < 0.0) throw DomainError("analysis_l1_problem: lambda must be >= 0");
  ProblemSpec p;
  p.kind = ProblemKind::AnalysisL1PrimalDual;
  p.n = A.cols();
  p.m = B.rows();
  p.lambda = lambda;
  const double sigma = spectral_norm(A).value;
  p.L = sigma * sigma;
  if (!(p.L > 0.0)) throw DomainError("analysis_l1_problem: A is zero");
  p.B = B;
  p.B_norm = spectral_norm(B).value;
  p.prox_g = prox_l1(lambda);
  p.prox_h = prox_zero();
  p.grad_f = [A, b](const Vector& x) -> Vector {
    return A.transpose() * (A * x - b);
  };
  p.objective = [A, b, B, lambda](const Vector& x) {
    return 0.5 * (A * x - b).squaredNorm() + lambda * (B * x).lpNorm<1>();
  };
  return p;
}

StepSizeBounds step_size_bounds(double L, double B_norm,
                                std::optional<double> beta) {
  if (!(L > 0.0)) throw DomainError("step_size_bounds: L must be positive");
  if (B_norm < 0.0) throw DomainError("step_size_bounds: |B| must be >= 0");
  StepSizeBounds out;
  out.beta_max = 2.0 / L;
  if (beta) {
    if (!(*beta > 0.0) || !(*beta < out.beta_max)) {
      throw DomainError("step_size_bounds: beta must lie in (0, 2/L)");
    }
    const double slack = 2.0 - *beta * L;
    out.eta_max = 2.0 * slack / (4.0 * *beta * B_norm * B_norm + L * slack);
    out.interior_condition =
        primal_dual_condition(L, B_norm, *beta, 0.5 * *out.eta_max);
  }
  return out;
}

bool primal_dual_condition(double L, double B_norm, double beta, double eta) {
  return (1.0 / beta - 0.5 * L) * (1.0 / eta - 0.5 * L) > B_norm * B_norm;
}

double default_beta(const ProblemSpec& problem) { return 1.0 / problem.L; }

double default_eta(const ProblemSpec& problem, double beta) {
  return 0.5 * *step_size_bounds(problem.L, problem.B_norm, beta).eta_max;
}

Operator make_T1(const ProblemSpec& problem, double beta) {
  Operator t1 = make_gradient_step(problem.grad_f, beta, problem.n);
  if (problem.kind == ProblemKind::LeastSquares && problem.exact_solution) {
    t1 = t1.with_hint(*problem.exact_solution);
  }
  return t1;
}

Operator make_T2(const ProblemSpec& problem, double beta) {
  if (!problem.prox_g) throw DomainError("make_T2: problem has no prox of g");
  if (problem.B) throw DomainError("make_T2: problem composes g with B");
  Operator prox = prox_op(*problem.prox_g, beta, problem.n, "prox_g");
  if (problem.exact_solution) {
    // prox and gradient step do not share the minimizer as a fixed point, so
    // the hint is attached to the composite directly.
    return compose(prox, make_gradient_step(problem.grad_f, beta, problem.n))
        .with_hint(*problem.exact_solution);
  }
  return compose(prox, make_gradient_step(problem.grad_f, beta, problem.n));
}

Operator make_T3(const ProblemSpec& problem, double beta, double eta) {
  if (!problem.B || !problem.prox_g) {
    throw DomainError("make_T3: problem needs B and a prox of g");
  }
  return make_primal_dual(problem.grad_f, problem.prox_h.value_or(prox_zero()),
                          *problem.prox_g, *problem.B, beta, eta);
}

Operator default_operator(const ProblemSpec& problem, double beta,
                          std::optional<double> eta) {
  switch (problem.kind) {
    case ProblemKind::LeastSquares:
      return make_T1(problem, beta);
    case ProblemKind::Lasso:
    case ProblemKind::SeparableSmoothL1:
      return make_T2(problem, beta);
    case ProblemKind::AnalysisL1PrimalDual:
      return make_T3(problem, beta, eta.value_or(default_eta(problem, beta)));
  }
  throw DomainError("default_operator: unknown problem kind");
}

ReferenceSolution reference_solution(const ProblemSpec& problem, double tol,
                                     std::optional<double> beta,
                                     std::optional<double> eta) {
  if (!(tol > 0.0)) throw DomainError("reference_solution: tol must be > 0");
  ReferenceSolution ref;
  if (problem.exact_solution) {
    ref.x = *problem.exact_solution;
    ref.state = ref.x;
    ref.exact = true;
    return ref;
  }
  const double b = beta.value_or(default_beta(problem));
  const Operator T = default_operator(problem, b, eta);
  const Vector start = Vector::Zero(T.dim());
  const IterationTrace trace =
      picard(T, start, kReferenceMaxIter, tol * 1e-3, std::nullopt,
             NormSpec::l2(), /*iterate_cap=*/0);
  if (trace.stop_reason != StopReason::ResidualTol) {
    throw NonConvergence("reference_solution: iteration stopped with " +
                             to_string(trace.stop_reason),
                         trace.residuals.empty() ? 0.0 : trace.residuals.back(),
                         trace.k_final);
  }
  ref.state = trace.x_final;
  ref.x = trace.x_final.head(problem.n);
  ref.achieved_residual = trace.residuals.back();
  ref.iterations = trace.k_final;
  return ref;
}

}  // namespace ganfp

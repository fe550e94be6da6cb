#pragma once

#include "ganfp/metrics.hpp"
#include "ganfp/operators.hpp"

#include <functional>
#include <optional>
#include <string>

namespace ganfp {

enum class ProblemKind { LeastSquares, Lasso, SeparableSmoothL1, AnalysisL1PrimalDual };

std::string to_string(ProblemKind k);

/// An instance of min f(x) + g(Bx) + h(x) with smooth f.
///
/// L bounds the Lipschitz constant of grad f in l2; L2_lower, when set, is a
/// matching lower bound |grad f(x) - grad f(y)| >= L2_lower |x - y|.
struct ProblemSpec {
  ProblemKind kind = ProblemKind::LeastSquares;
  Eigen::Index n = 0;
  Eigen::Index m = 0;
  VectorMap grad_f;
  std::function<double(const Vector&)> objective;
  std::optional<ProxFamily> prox_g;
  std::optional<ProxFamily> prox_h;
  std::optional<Matrix> B;
  double B_norm = 0.0;
  double L = 0.0;
  std::optional<double> L2_lower;
  std::optional<Vector> exact_solution;
  double lambda = 0.0;
};

/// f(x) = |Ax - b|^2 / 2 with A of full column rank. Throws DomainError for
/// rank-deficient A.
ProblemSpec least_squares_problem(const Matrix& A, const Vector& b);

/// f(x) = |Ax - b|^2 / 2 and g = lambda |.|_1, solved by T2. No closed-form
/// minimizer is attached.
ProblemSpec lasso_problem(const Matrix& A, const Vector& b, double lambda);

/// f(x) = sum_i coeffs_i (x_i - b_i)^2 / 2 and g = lambda |.|_1.
ProblemSpec separable_smooth_l1_problem(const Vector& coeffs, const Vector& b,
                                        double lambda);

/// f(x) = |Ax - b|^2 / 2, g = lambda |.|_1 composed with B, h = 0.
ProblemSpec analysis_l1_problem(const Matrix& A, const Vector& b,
                                const Matrix& B, double lambda);

struct StepSizeBounds {
  double beta_max = 0.0;
  std::optional<double> eta_max;
  /// Whether (1/beta - L/2)(1/eta - L/2) > |B|^2 holds at eta = eta_max / 2.
  std::optional<bool> interior_condition;
};

/// beta_max = 2/L; with beta, eta_max = 2(2 - beta L) / (4 beta |B|^2 +
/// L (2 - beta L)). The second bound is the admissible dual step size eta.
StepSizeBounds step_size_bounds(double L, double B_norm,
                                std::optional<double> beta = std::nullopt);

bool primal_dual_condition(double L, double B_norm, double beta, double eta);

double default_beta(const ProblemSpec& problem);
double default_eta(const ProblemSpec& problem, double beta);

Operator make_T1(const ProblemSpec& problem, double beta);
Operator make_T2(const ProblemSpec& problem, double beta);
Operator make_T3(const ProblemSpec& problem, double beta, double eta);

/// The operator the problem is naturally solved with: T1 for least squares,
/// T2 for the lasso and separable problems, T3 for the analysis problem.
Operator default_operator(const ProblemSpec& problem, double beta,
                          std::optional<double> eta = std::nullopt);

struct ReferenceSolution {
  Vector x;
  Vector state;  // full fixed-point state (x, y) for the primal-dual case
  bool exact = false;
  double achieved_residual = 0.0;
  std::size_t iterations = 0;
};

/// The exact minimizer when known; otherwise the terminal iterate of the
/// problem's own iteration run to residual tol * 1e-3 (at most 1e6 steps).
ReferenceSolution reference_solution(const ProblemSpec& problem, double tol,
                                     std::optional<double> beta = std::nullopt,
                                     std::optional<double> eta = std::nullopt);

}  // namespace ganfp

#pragma once

#include "ganfp/metrics.hpp"
#include "ganfp/operators.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace ganfp {

enum class StopReason { ResidualTol, MaxIter, Diverged };

std::string to_string(StopReason r);

inline constexpr double kDivergenceFactor = 1e6;
inline constexpr std::size_t kDefaultIterateCap = 4'000'000;  // doubles

/// Record of a Picard run x^{k+1} = T x^k.
///
/// residuals[k] = |x^{k+1} - x^k| for k < k_final. errors_to_ref[k] =
/// |x^k - ref| for k <= k_final. iterates holds x^0..x^{k_final} only while
/// their total size stays under the cap given to picard.
struct IterationTrace {
  std::string label;
  NormSpec norm = NormSpec::l2();
  Vector x0;
  Vector x_final;
  std::optional<std::vector<Vector>> iterates;
  std::vector<double> residuals;
  std::optional<Vector> reference;
  std::optional<std::vector<double>> errors_to_ref;
  std::size_t k_final = 0;
  StopReason stop_reason = StopReason::MaxIter;
  double res_tol = 0.0;
};

/// Runs until a residual is <= res_tol, max_iter steps are taken, or a
/// residual exceeds 1e6 * (1 + first residual). Throws NonFiniteIterate if an
/// iterate overflows or turns NaN.
IterationTrace picard(const Operator& T, const Vector& x0,
                      std::size_t max_iter, double res_tol,
                      const std::optional<Vector>& ref = std::nullopt,
                      const NormSpec& norm = NormSpec::l2(),
                      std::size_t iterate_cap = kDefaultIterateCap);

enum class RateModel { Polynomial, Exponential };

std::string to_string(RateModel m);
RateModel rate_model_from_string(const std::string& s);

/// Least-squares fit of a decay model to seq[i] at index k = i + 1.
/// Polynomial: seq ~ C k^{-p}. Exponential: seq ~ C rho^k.
struct RateFit {
  RateModel model = RateModel::Exponential;
  double exponent_p = 0.0;
  double rho = 0.0;
  double log_constant = 0.0;
  double r_squared = 0.0;
  std::size_t tail_start = 0;
  std::size_t n_points = 0;
};

/// Uses seq[tail_start..] up to the first nonpositive entry; needs >= 5
/// points. The overload without tail_start uses seq.size() / 2.
RateFit fit_rate(const std::vector<double>& seq, RateModel model,
                 std::size_t tail_start);
RateFit fit_rate(const std::vector<double>& seq, RateModel model);

/// Finite-trace stand-in for seq_k = o(k^{-exponent}): over the final half
/// of the positive prefix of seq, s_k = k^exponent * seq_k must have a
/// negative regression slope in k and end at or below half its first value.
struct LittleOReport {
  double exponent = 0.0;
  double slope = 0.0;
  double first = 0.0;
  double last = 0.0;
  std::size_t window_start = 0;
  std::size_t n_points = 0;
  bool pass = false;
};

LittleOReport little_o_proxy(const std::vector<double>& seq, double exponent);

struct SummabilityReport {
  std::vector<double> partial_sums;  // S_K = sum_{k<=K} mu residual_k^gamma
  double bound = 0.0;                // |x0 - xhat|^gamma
  double max_excess = 0.0;           // max_K (S_K - bound)
  double tol = 0.0;
  bool pass = false;
};

SummabilityReport check_residual_summability(const IterationTrace& trace,
                                             double gamma, double mu,
                                             const Vector& xhat,
                                             double tol = 1e-10);

enum class TailMode { Absorbed, Exponential, Inconclusive };

std::string to_string(TailMode m);

/// Two-sided bound mu * sum_{j>=k} r_j <= |x^k - x*| <= sum_{j>=k} r_j.
/// The infinite tail beyond the trace is zero when the trace ended on an
/// exactly zero residual, r_last * rho / (1 - rho) when an exponential fit of
/// the residual tail has r^2 >= 0.99, and otherwise unknown, in which case the
/// upper inequality is reported as inconclusive.
struct SandwichReport {
  double lower_worst = 0.0;  // min_k |x^k - x*| - mu S_k
  double upper_worst = 0.0;  // min_k S_k - |x^k - x*|
  std::size_t lower_worst_k = 0;
  std::size_t upper_worst_k = 0;
  double remainder = 0.0;
  TailMode tail_mode = TailMode::Inconclusive;
  double tol = 0.0;
  bool lower_pass = false;
  bool upper_pass = false;
  bool upper_conclusive = false;
  bool pass = false;
};

SandwichReport check_sandwich(const IterationTrace& trace, const Vector& xstar,
                              double mu, double tol = 1e-8);

/// (a_K^{-p} + p sum_{j=K}^{k-1} b_j)^{-1/p}; for p = 0 the limit
/// a_K exp(-sum b_j) is used.
double recurrence_bound(double aK, double p, const std::vector<double>& b,
                        std::size_t K, std::size_t k);

struct RecurrenceReport {
  std::size_t premise_checks = 0;
  std::size_t premise_violations = 0;
  std::optional<std::size_t> first_premise_violation;
  std::size_t bound_checks = 0;
  std::size_t bound_violations = 0;
  std::optional<std::size_t> first_bound_violation;
  bool pass = false;
};

/// Checks a_{k+1} <= a_k (1 - mu a_k^p) along seq; on every run where the
/// premise holds from K onward, also checks a_k <= recurrence_bound + tol.
RecurrenceReport verify_recurrence_bound(const std::vector<double>& seq,
                                         double p, double mu,
                                         double tol = 1e-12);

}  // namespace ganfp

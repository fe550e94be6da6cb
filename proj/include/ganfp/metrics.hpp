#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>

namespace ganfp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Symmetric positive-definite weight together with its lower Cholesky
/// factor, W = factor * factor^T.
class WeightedMetric {
 public:
  /// Symmetrizes `W` as (W + W^T)/2 and factorizes it. Throws DomainError if
  /// the asymmetry exceeds 1e-12 relative to max|W_ij|, and
  /// NotPositiveDefinite if a pivot drops below 1e-12 * max diagonal.
  explicit WeightedMetric(const Matrix& W);

  const Matrix& weight() const { return weight_; }
  const Matrix& factor() const { return factor_; }
  Eigen::Index dim() const { return weight_.rows(); }

  double norm(const Vector& x) const;
  double inner(const Vector& x, const Vector& y) const;

 private:
  Matrix weight_;
  Matrix factor_;
};

enum class NormKind { L2, L1, Weighted };

std::string to_string(NormKind kind);

/// Selects one of the supported norms on R^n. Cheap to copy; the weighted
/// variant shares its immutable factorization.
class NormSpec {
 public:
  static NormSpec l2();
  static NormSpec l1();
  static NormSpec weighted(const Matrix& W);
  static NormSpec weighted(std::shared_ptr<const WeightedMetric> metric);

  NormKind kind() const { return kind_; }
  const WeightedMetric* metric() const { return metric_.get(); }
  std::string name() const { return to_string(kind_); }

  double operator()(const Vector& x) const;

 private:
  NormSpec(NormKind kind, std::shared_ptr<const WeightedMetric> metric)
      : kind_(kind), metric_(std::move(metric)) {}

  NormKind kind_;
  std::shared_ptr<const WeightedMetric> metric_;
};

double norm(const Vector& x, const NormSpec& spec);

struct SpectralEstimate {
  double value = 0.0;
  std::size_t iterations = 0;
};

inline constexpr double kDefaultSpectralTol = 1e-10;
inline constexpr std::size_t kDefaultSpectralMaxIter = 10000;
inline constexpr std::uint64_t kSpectralSeed = 0x5eed'0f'9a'4bULL;

/// Largest singular value of M by power iteration on M^T M from a fixed
/// seeded start vector. Stops once the eigen-residual of M^T M drops below
/// tol times the current eigenvalue estimate, which bounds the relative error
/// of the returned singular value by tol. Throws NonConvergence otherwise.
SpectralEstimate spectral_norm(const Matrix& M,
                               double tol = kDefaultSpectralTol,
                               std::size_t max_iter = kDefaultSpectralMaxIter);

/// Smallest eigenvalue of a symmetric positive-definite matrix by inverse
/// power iteration on its Cholesky factorization.
SpectralEstimate smallest_eigenvalue_spd(
    const Matrix& S, double tol = kDefaultSpectralTol,
    std::size_t max_iter = kDefaultSpectralMaxIter);

/// Assembles W = [[I/beta, -B^T], [-B, I/eta]] and factorizes it.
std::shared_ptr<const WeightedMetric> build_W(double beta, double eta,
                                              const Matrix& B);

// Plain-text matrix format: "rows cols" then row-major values.
Matrix read_matrix(std::istream& in);
Matrix load_matrix(const std::string& path);
void write_matrix(std::ostream& out, const Matrix& M);

}  // namespace ganfp

#pragma once

#include "ganfp/metrics.hpp"
#include "ganfp/operators.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ganfp {

enum class Property { GAN, Nonexpansive, Contractive, FpContractive, HolderRegular };

std::string to_string(Property p);
Property property_from_string(const std::string& s);

enum class Verdict { Pass, Fail };

std::string to_string(Verdict v);

inline constexpr double kDefaultSlackTol = 1e-10;
inline constexpr double kQuotientCutoff = 1e-14;

/// How sample pairs are drawn. For every radius scale r, `n_pairs` pairs are
/// drawn around the center (plan center, else the operator's fixed-point
/// hint, else the origin): x = c + r g1, and y is one of c + r g2, the mirror
/// 2c - x, or the hint itself. Samples are generated up front from `seed`, so
/// results do not depend on `threads`.
struct SamplingPlan {
  std::size_t n_pairs = 1000;
  std::vector<double> radius_scales = {0.1, 1.0, 10.0, 1e3};
  std::uint64_t seed = 1;
  std::optional<Vector> center;
  unsigned threads = 1;

  void validate() const;
  std::size_t total() const { return n_pairs * radius_scales.size(); }
};

struct ClassParams {
  std::optional<double> gamma;
  std::optional<double> mu;
  std::optional<double> rho;
};

/// Sampled evidence for an operator-class inequality. A Pass only means no
/// sampled pair refuted the inequality; a Fail carries a refuting witness.
struct GanCertificate {
  Property property = Property::GAN;
  std::optional<double> gamma;
  std::optional<double> mu;
  std::optional<double> rho;
  NormSpec norm = NormSpec::l2();
  Verdict verdict = Verdict::Pass;
  double min_slack = 0.0;
  std::pair<Vector, Vector> witness;
  std::size_t n_checked = 0;
  double tol = kDefaultSlackTol;
  std::string operator_label;
  std::vector<std::string> notes;

  bool passed() const { return verdict == Verdict::Pass; }
};

/// |x-y|^g - |Tx-Ty|^g - mu |(I-T)x - (I-T)y|^g.
double gan_slack(const Operator& T, const Vector& x, const Vector& y,
                 double gamma, double mu, const NormSpec& norm);

/// Slack of the selected class inequality at (x, y). For the fixed-point
/// based classes y plays the role of the fixed point.
double property_slack(const Operator& T, Property property,
                      const ClassParams& params, const NormSpec& norm,
                      const Vector& x, const Vector& y);

/// The deterministic list of sample pairs a plan produces for T.
std::vector<std::pair<Vector, Vector>> sample_pairs(const Operator& T,
                                                    const SamplingPlan& plan);

GanCertificate certify(const Operator& T, Property property,
                       const ClassParams& params, const NormSpec& norm,
                       const SamplingPlan& plan, double tol = kDefaultSlackTol);

/// Infimum over sampled pairs of (|x-y|^g - |Tx-Ty|^g) / |(I-T)x-(I-T)y|^g.
/// Pairs whose denominator norm is at most 1e-14 * max(1, |x|, |y|) are
/// skipped. Returns 0 as soon as a quotient is nonpositive.
double estimate_mu(const Operator& T, double gamma, const NormSpec& norm,
                   const SamplingPlan& plan);

/// Largest sampled ratio |Tx - xhat| / |x - xhat| over non-fixed sample
/// points, xhat being the operator's fixed-point hint.
double empirical_fp_ratio(const Operator& T, const NormSpec& norm,
                          const SamplingPlan& plan);

struct GammaEstimate {
  double gamma = 0.0;
  GanCertificate certificate;  // certificate at the returned exponent
};

/// Bisection for the smallest exponent at which certify(GAN, mu) passes.
GammaEstimate estimate_min_gamma(const Operator& T, double mu,
                                 const NormSpec& norm, const SamplingPlan& plan,
                                 double lo, double hi, double width = 1e-3,
                                 double tol = kDefaultSlackTol);

double psi(double alpha, double gamma);
double mu_hat(double rho, double gamma);
double composition_mu(double mu1, double mu2, double gamma);

/// Membership grid of {y : |y - xhat|^g + mu |y - x|^g <= |x - xhat|^g} in
/// the l2 norm, sampled at cell centers of a square covering B(xhat, |x-xhat|).
struct RegionGrid {
  Eigen::Vector2d x;
  Eigen::Vector2d xhat;
  double gamma = 0.0;
  double mu = 0.0;
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<unsigned char> cells;  // row-major, row index runs along y

  bool at(std::size_t row, std::size_t col) const {
    return cells[row * nx + col] != 0;
  }
  Eigen::Vector2d cell_center(std::size_t row, std::size_t col) const;
};

/// |x - xhat|^g - |y - xhat|^g - mu |y - x|^g; y is in the region iff >= 0.
double region_slack(const Eigen::Vector2d& y, const Eigen::Vector2d& x,
                    const Eigen::Vector2d& xhat, double gamma, double mu);

RegionGrid range_region(const Eigen::Vector2d& x, const Eigen::Vector2d& xhat,
                        double gamma, double mu, std::size_t resolution);

}  // namespace ganfp

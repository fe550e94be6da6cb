#include "ganfp/metrics.hpp"

#include "ganfp/error.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <random>

namespace ganfp {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPivotRelTol = 1e-12;

Matrix cholesky_lower(const Matrix& W) {
  const Eigen::Index n = W.rows();
  const double max_diag = n > 0 ? W.diagonal().maxCoeff() : 0.0;
  const double threshold = max_diag > 0.0 ? kPivotRelTol * max_diag : 0.0;
  Matrix L = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = W(j, j);
    for (Eigen::Index k = 0; k < j; ++k) d -= L(j, k) * L(j, k);
    if (!(d > threshold)) {
      throw NotPositiveDefinite(static_cast<std::size_t>(j), d, threshold);
    }
    const double ljj = std::sqrt(d);
    L(j, j) = ljj;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      double s = W(i, j);
      for (Eigen::Index k = 0; k < j; ++k) s -= L(i, k) * L(j, k);
      L(i, j) = s / ljj;
    }
  }
  return L;
}

Vector seeded_unit_vector(Eigen::Index n) {
  std::mt19937_64 rng(kSpectralSeed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v / v.norm();
}

}  // namespace

WeightedMetric::WeightedMetric(const Matrix& W) {
  if (W.rows() != W.cols() || W.rows() == 0) {
    throw DomainError("weight matrix must be square and nonempty");
  }
  const double scale = W.cwiseAbs().maxCoeff();
  const double asym = (W - W.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTol * scale) {
    throw DomainError("weight matrix is not symmetric (max asymmetry " +
                      std::to_string(asym) + ")");
  }
  weight_ = 0.5 * (W + W.transpose());
  factor_ = cholesky_lower(weight_);
}

double WeightedMetric::norm(const Vector& x) const {
  if (x.size() != dim()) {
    throw DimensionMismatch("weighted norm", static_cast<std::size_t>(dim()),
                            static_cast<std::size_t>(x.size()));
  }
  return (factor_.transpose() * x).norm();
}

double WeightedMetric::inner(const Vector& x, const Vector& y) const {
  if (x.size() != dim() || y.size() != dim()) {
    throw DimensionMismatch("weighted inner product",
                            static_cast<std::size_t>(dim()),
                            static_cast<std::size_t>(x.size()));
  }
  return x.dot(weight_ * y);
}

std::string to_string(NormKind kind) {
  switch (kind) {
    case NormKind::L2:
      return "l2";
    case NormKind::L1:
      return "l1";
    case NormKind::Weighted:
      return "weighted";
  }
  return "unknown";
}

NormSpec NormSpec::l2() { return NormSpec(NormKind::L2, nullptr); }
NormSpec NormSpec::l1() { return NormSpec(NormKind::L1, nullptr); }

NormSpec NormSpec::weighted(const Matrix& W) {
  return NormSpec(NormKind::Weighted, std::make_shared<WeightedMetric>(W));
}

NormSpec NormSpec::weighted(std::shared_ptr<const WeightedMetric> metric) {
  if (!metric) throw DomainError("weighted norm requires a metric");
  return NormSpec(NormKind::Weighted, std::move(metric));
}

double NormSpec::operator()(const Vector& x) const {
  switch (kind_) {
    case NormKind::L2:
      return x.norm();
    case NormKind::L1:
      return x.lpNorm<1>();
    case NormKind::Weighted:
      return metric_->norm(x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

double norm(const Vector& x, const NormSpec& spec) { return spec(x); }

SpectralEstimate spectral_norm(const Matrix& M, double tol,
                               std::size_t max_iter) {
  if (M.size() == 0) throw DomainError("spectral_norm: empty matrix");
  if (!(tol > 0.0)) throw DomainError("spectral_norm: tol must be positive");

  Vector v = seeded_unit_vector(M.cols());
  double lambda = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const Vector w = M.transpose() * (M * v);
    const double wn = w.norm();
    if (wn == 0.0) return {0.0, it};
    lambda = v.dot(w);
    const double residual = (w - lambda * v).norm();
    if (residual <= tol * lambda) return {std::sqrt(lambda), it};
    v = w / wn;
  }
  throw NonConvergence("spectral_norm: power iteration did not converge",
                       std::sqrt(std::max(lambda, 0.0)), max_iter);
}

SpectralEstimate smallest_eigenvalue_spd(const Matrix& S, double tol,
                                         std::size_t max_iter) {
  if (S.rows() != S.cols() || S.size() == 0) {
    throw DomainError("smallest_eigenvalue_spd: matrix must be square");
  }
  const Matrix L = cholesky_lower(0.5 * (S + S.transpose()));
  Vector v = seeded_unit_vector(S.cols());
  double theta = 0.0;
  for (std::size_t it = 1; it <= max_iter; ++it) {
    const Vector z = L.triangularView<Eigen::Lower>().solve(v);
    const Vector w = L.transpose().triangularView<Eigen::Upper>().solve(z);
    theta = v.dot(w);
    const double residual = (w - theta * v).norm();
    if (residual <= tol * theta) return {1.0 / theta, it};
    v = w / w.norm();
  }
  throw NonConvergence("smallest_eigenvalue_spd: inverse iteration did not "
                       "converge",
                       theta > 0.0 ? 1.0 / theta : 0.0, max_iter);
}

std::shared_ptr<const WeightedMetric> build_W(double beta, double eta,
                                              const Matrix& B) {
  if (!(beta > 0.0) || !(eta > 0.0)) {
    throw DomainError("build_W: beta and eta must be positive");
  }
  const Eigen::Index m = B.rows();
  const Eigen::Index n = B.cols();
  Matrix W(n + m, n + m);
  W.topLeftCorner(n, n) = Matrix::Identity(n, n) / beta;
  W.topRightCorner(n, m) = -B.transpose();
  W.bottomLeftCorner(m, n) = -B;
  W.bottomRightCorner(m, m) = Matrix::Identity(m, m) / eta;
  return std::make_shared<WeightedMetric>(W);
}

Matrix read_matrix(std::istream& in) {
  long rows = -1;
  long cols = -1;
  if (!(in >> rows >> cols) || rows <= 0 || cols <= 0) {
    throw Error("matrix text: expected positive 'rows cols' header");
  }
  Matrix M(rows, cols);
  for (long i = 0; i < rows; ++i) {
    for (long j = 0; j < cols; ++j) {
      if (!(in >> M(i, j))) {
        throw Error("matrix text: expected " + std::to_string(rows * cols) +
                    " values, read " + std::to_string(i * cols + j));
      }
    }
  }
  double extra = 0.0;
  if (in >> extra) throw Error("matrix text: trailing values after matrix");
  return M;
}

Matrix load_matrix(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open matrix file '" + path + "'");
  return read_matrix(in);
}

void write_matrix(std::ostream& out, const Matrix& M) {
  out << M.rows() << ' ' << M.cols() << '\n';
  out << std::setprecision(17);
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    for (Eigen::Index j = 0; j < M.cols(); ++j) {
      if (j > 0) out << ' ';
      out << M(i, j);
    }
    out << '\n';
  }
}

}  // namespace ganfp

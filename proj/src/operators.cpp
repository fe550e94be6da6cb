#include "ganfp/operators.hpp"

#include "ganfp/error.hpp"

#include <cmath>
#include <sstream>
#include <utility>

namespace ganfp {

namespace {

std::string fmt_scalar(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

Operator::Operator(Eigen::Index dim, VectorMap map, std::string label,
                   std::optional<Vector> hint)
    : dim_(dim), map_(std::move(map)), label_(std::move(label)) {
  if (dim_ <= 0) throw DomainError("operator dimension must be positive");
  if (!map_) throw DomainError("operator map is empty");
  if (hint) {
    Operator checked = with_hint(std::move(*hint));
    hint_ = std::move(checked.hint_);
  }
}

Vector Operator::apply(const Vector& x) const {
  if (x.size() != dim_) {
    throw DimensionMismatch(label_, static_cast<std::size_t>(dim_),
                            static_cast<std::size_t>(x.size()));
  }
  Vector y = map_(x);
  if (y.size() != dim_) {
    throw DimensionMismatch(label_ + " (output)",
                            static_cast<std::size_t>(dim_),
                            static_cast<std::size_t>(y.size()));
  }
  return y;
}

Operator Operator::with_hint(Vector hint) const {
  if (hint.size() != dim_) {
    throw DimensionMismatch(label_ + " fixed-point hint",
                            static_cast<std::size_t>(dim_),
                            static_cast<std::size_t>(hint.size()));
  }
  const double defect = (map_(hint) - hint).norm();
  if (defect > kHintTol * (1.0 + hint.norm())) {
    throw DomainError(label_ + ": fixed-point hint is not a fixed point "
                      "(defect " + fmt_scalar(defect) + ")");
  }
  Operator out = *this;
  out.hint_ = std::move(hint);
  return out;
}

Vector soft_threshold(double lambda, const Vector& x) {
  if (lambda < 0.0) throw DomainError("soft_threshold: lambda < 0");
  Vector y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double t = x(i);
    if (t > lambda) {
      y(i) = t - lambda;
    } else if (t < -lambda) {
      y(i) = t + lambda;
    } else {
      y(i) = 0.0;
    }
  }
  return y;
}

Vector block_soft_threshold(double lambda, const Vector& x) {
  if (lambda < 0.0) throw DomainError("block_soft_threshold: lambda < 0");
  const double r = x.norm();
  if (r > lambda) return (1.0 - lambda / r) * x;
  return Vector::Zero(x.size());
}

ProxFamily prox_l1(double lambda) {
  if (lambda < 0.0) throw DomainError("prox_l1: lambda < 0");
  return [lambda](double scale, const Vector& x) {
    return soft_threshold(lambda * scale, x);
  };
}

ProxFamily prox_l2(double lambda) {
  if (lambda < 0.0) throw DomainError("prox_l2: lambda < 0");
  return [lambda](double scale, const Vector& x) {
    return block_soft_threshold(lambda * scale, x);
  };
}

ProxFamily prox_zero() {
  return [](double, const Vector& x) { return x; };
}

ProxFamily prox_box(double lo, double hi) {
  if (lo > hi) throw DomainError("prox_box: lo > hi");
  return [lo, hi](double, const Vector& x) -> Vector {
    return x.cwiseMax(lo).cwiseMin(hi);
  };
}

Operator identity_op(Eigen::Index dim) {
  return Operator(dim, [](const Vector& x) { return x; }, "identity",
                  Vector::Zero(dim));
}

Operator affine_op(double alpha, const Vector& z) {
  std::optional<Vector> hint;
  if (alpha != 1.0) hint = z / (1.0 - alpha);
  return Operator(
      z.size(), [alpha, z](const Vector& x) -> Vector { return alpha * x + z; },
      "affine(" + fmt_scalar(alpha) + ")", std::move(hint));
}

Operator prox_op(const ProxFamily& prox, double scale, Eigen::Index dim,
                 std::string label) {
  return Operator(
      dim, [prox, scale](const Vector& x) { return prox(scale, x); },
      std::move(label));
}

Operator make_gradient_step(VectorMap grad_f, double beta, Eigen::Index dim) {
  if (!(beta > 0.0)) throw DomainError("make_gradient_step: beta <= 0");
  return Operator(
      dim,
      [grad_f = std::move(grad_f), beta](const Vector& x) -> Vector {
        return x - beta * grad_f(x);
      },
      "gradient_step(beta=" + fmt_scalar(beta) + ")");
}

Operator compose(const Operator& S, const Operator& T) {
  if (S.dim() != T.dim()) {
    throw DimensionMismatch("compose", static_cast<std::size_t>(S.dim()),
                            static_cast<std::size_t>(T.dim()));
  }
  std::optional<Vector> hint;
  const auto& hs = S.fixed_point_hint();
  const auto& ht = T.fixed_point_hint();
  if (hs && ht && (*hs - *ht).norm() <= kHintTol * (1.0 + hs->norm())) {
    hint = *ht;
  }
  Operator out(
      S.dim(), [S, T](const Vector& x) { return S.apply(T.apply(x)); },
      S.label() + " o " + T.label());
  if (hint) {
    try {
      out = out.with_hint(std::move(*hint));
    } catch (const DomainError&) {
      // Agreeing hints that are not fixed by the composite are dropped.
    }
  }
  return out;
}

Operator make_primal_dual(VectorMap grad_f, ProxFamily prox_h,
                          ProxFamily prox_g, const Matrix& B, double beta,
                          double eta) {
  build_W(beta, eta, B);
  const Eigen::Index n = B.cols();
  const Eigen::Index m = B.rows();
  auto map = [grad_f = std::move(grad_f), prox_h = std::move(prox_h),
              prox_g = std::move(prox_g), B, beta, eta, n,
              m](const Vector& v) -> Vector {
    const Vector x = v.head(n);
    const Vector y = v.tail(m);
    const Vector x_next =
        prox_h(beta, x - beta * (grad_f(x) + B.transpose() * y));
    const Vector shifted = y / eta + B * (2.0 * x_next - x);
    const Vector y_next = eta * (shifted - prox_g(1.0 / eta, shifted));
    Vector out(n + m);
    out << x_next, y_next;
    return out;
  };
  return Operator(n + m, std::move(map),
                  "primal_dual(beta=" + fmt_scalar(beta) +
                      ",eta=" + fmt_scalar(eta) + ")");
}

}  // namespace ganfp

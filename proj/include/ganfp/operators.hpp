#pragma once

#include "ganfp/metrics.hpp"

#include <functional>
#include <optional>
#include <string>

namespace ganfp {

using VectorMap = std::function<Vector(const Vector&)>;

/// prox of (scale * g), evaluated at x.
using ProxFamily = std::function<Vector(double scale, const Vector& x)>;

/// A self-map of R^dim. Immutable after construction; apply is reentrant.
class Operator {
 public:
  /// Throws DomainError if `hint` is set but is not a fixed point to within
  /// 1e-8 * (1 + |hint|).
  Operator(Eigen::Index dim, VectorMap map, std::string label,
           std::optional<Vector> hint = std::nullopt);

  Eigen::Index dim() const { return dim_; }
  const std::string& label() const { return label_; }
  const std::optional<Vector>& fixed_point_hint() const { return hint_; }

  Vector apply(const Vector& x) const;
  Vector operator()(const Vector& x) const { return apply(x); }

  Operator with_hint(Vector hint) const;

 private:
  Eigen::Index dim_;
  VectorMap map_;
  std::string label_;
  std::optional<Vector> hint_;
};

inline constexpr double kHintTol = 1e-8;

Vector soft_threshold(double lambda, const Vector& x);
Vector block_soft_threshold(double lambda, const Vector& x);

// Built-in prox families.
ProxFamily prox_l1(double lambda);
ProxFamily prox_l2(double lambda);
ProxFamily prox_zero();
ProxFamily prox_box(double lo, double hi);

Operator identity_op(Eigen::Index dim);

/// x -> alpha x + z; carries the fixed point z/(1-alpha) when alpha != 1.
Operator affine_op(double alpha, const Vector& z);

/// x -> prox_{scale g}(x) as an operator.
Operator prox_op(const ProxFamily& prox, double scale, Eigen::Index dim,
                 std::string label);

/// T1 = I - beta grad_f.
Operator make_gradient_step(VectorMap grad_f, double beta, Eigen::Index dim);

/// S o T. The fixed-point hint survives only if both hints agree to 1e-8.
Operator compose(const Operator& S, const Operator& T);

/// Primal-dual operator on R^(n+m) acting on v = (x, y):
///   x+ = prox_{beta h}(x - beta (grad_f(x) + B^T y))
///   y+ = eta (I - prox_{g/eta})(y/eta + B (2 x+ - x))
/// The dual step uses the Moreau identity, so prox of g* is never formed.
/// Throws NotPositiveDefinite if the W metric for (beta, eta, B) is not PD.
Operator make_primal_dual(VectorMap grad_f, ProxFamily prox_h,
                          ProxFamily prox_g, const Matrix& B, double beta,
                          double eta);

}  // namespace ganfp

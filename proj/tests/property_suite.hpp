// Seeded property checks shared by the unit tests and the acceptance runner.
#pragma once

#include "ganfp/certify.hpp"
#include "ganfp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <string>

namespace props {

using ganfp::Vector;

struct Outcome {
  bool pass = true;
  std::size_t samples = 0;
  double worst = std::numeric_limits<double>::infinity();  // smallest slack seen
  std::string detail;
};

inline void record(Outcome& o, double slack, double tol) {
  ++o.samples;
  o.worst = std::min(o.worst, slack);
  if (slack < -tol) o.pass = false;
}

/// (a + b)^g >= a^g + b^g for a, b >= 0 and g >= 1.
inline Outcome power_superadditivity(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ab(0.0, 1.0), g(1.0, 10.0);
  Outcome o;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = ab(rng), b = ab(rng), gamma = g(rng);
    record(o, std::pow(a + b, gamma) - std::pow(a, gamma) - std::pow(b, gamma), 1e-12);
  }
  return o;
}

/// a^g + b^g <= c^g implies the same for every larger exponent.
inline Outcome power_exponent_lifting(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0), g(0.1, 5.0);
  Outcome o;
  while (o.samples < n) {
    const double a = u(rng), b = u(rng), c = u(rng), gamma = g(rng);
    if (std::pow(a, gamma) + std::pow(b, gamma) > std::pow(c, gamma)) continue;
    const double gamma2 = gamma + u(rng) * (10.0 - gamma);
    record(o, std::pow(c, gamma2) - std::pow(a, gamma2) - std::pow(b, gamma2), 1e-12);
  }
  return o;
}

/// psi(., g) decreases on (0, 1) for g < 1 and increases for g > 1.
inline Outcome psi_monotonicity() {
  Outcome o;
  for (double gamma : {0.3, 0.7, 1.5, 3.0}) {
    double prev = ganfp::psi(0.01, gamma);
    for (int i = 2; i <= 99; ++i) {
      const double cur = ganfp::psi(i / 100.0, gamma);
      const double step = gamma < 1.0 ? prev - cur : cur - prev;
      ++o.samples;
      o.worst = std::min(o.worst, step);
      if (!(step > 0.0)) {
        o.pass = false;
        std::ostringstream os;
        os << "gamma " << gamma << " alpha " << i / 100.0;
        o.detail = os.str();
      }
      prev = cur;
    }
  }
  return o;
}

inline ganfp::SamplingPlan plan(std::size_t n_pairs, std::uint64_t seed,
                                std::vector<double> scales = {0.1, 1.0, 10.0}) {
  ganfp::SamplingPlan p;
  p.n_pairs = n_pairs;
  p.seed = seed;
  p.radius_scales = std::move(scales);
  return p;
}

/// Contractions x -> rho x + z satisfy the GAN inequality with mu_hat.
inline Outcome contraction_mu_hat(std::size_t pairs_per_case, std::uint64_t seed) {
  Outcome o;
  const Vector z = (Vector(3) << 0.5, -1.0, 2.0).finished();
  for (double rho : {0.1, 0.5, 0.9}) {
    const auto T = ganfp::affine_op(rho, z);
    for (double gamma : {0.5, 1.0, 2.0, 3.0}) {
      const auto cert = ganfp::certify(T, ganfp::Property::GAN,
                                       {gamma, ganfp::mu_hat(rho, gamma), std::nullopt},
                                       ganfp::NormSpec::l2(), plan(pairs_per_case, seed));
      o.samples += cert.n_checked;
      o.worst = std::min(o.worst, cert.min_slack);
      if (!cert.passed()) o.pass = false;
    }
  }
  return o;
}

struct GanCase {
  ganfp::Operator T;
  double gamma;
  double mu;
};

// Scalar cases: the exponent-one profile of the soft threshold does not carry
// over to the Euclidean norm in higher dimensions.
inline std::vector<GanCase> certified_cases() {
  const Vector z = Vector::Constant(1, 0.75);
  const auto st = ganfp::prox_op(ganfp::prox_l1(1.0), 1.0, 1, "soft_threshold")
                      .with_hint(Vector::Zero(1));
  return {
      {st, 1.0, 1.0},
      {st, 2.0, 1.0},
      {ganfp::affine_op(0.5, z), 2.0, 3.0},
      {ganfp::affine_op(0.5, z), 1.0, 1.0},
      {ganfp::affine_op(-0.5, z), 1.0, 1.0 / 3.0},
  };
}

/// A certified (g1, mu) operator has nonnegative slack at (g2, mu^(g2/g1))
/// on the same pairs, for g2 > g1.
inline Outcome gan_exponent_lifting(std::size_t pairs_per_case, std::uint64_t seed) {
  Outcome o;
  for (const auto& c : certified_cases()) {
    const auto p = plan(pairs_per_case, seed);
    const auto base = ganfp::certify(c.T, ganfp::Property::GAN, {c.gamma, c.mu, std::nullopt},
                                     ganfp::NormSpec::l2(), p);
    if (!base.passed()) {
      o.pass = false;
      o.detail = "base certificate failed for " + c.T.label();
      continue;
    }
    for (double g2 : {c.gamma * 1.5, c.gamma * 2.0, c.gamma + 3.0}) {
      const double mu2 = std::pow(c.mu, g2 / c.gamma);
      for (const auto& [x, y] : ganfp::sample_pairs(c.T, p)) {
        record(o, ganfp::gan_slack(c.T, x, y, g2, mu2, ganfp::NormSpec::l2()), 1e-10);
      }
    }
  }
  return o;
}

/// Composition of (g, mu1) and (g, mu2) operators passes at composition_mu
/// on samples disjoint from the ones used to certify the factors.
inline Outcome composition_closure(std::size_t pairs_per_case, std::uint64_t seed) {
  Outcome o;
  const auto cases = certified_cases();
  for (std::size_t i = 0; i < cases.size(); ++i) {
    for (std::size_t j = 0; j < cases.size(); ++j) {
      const auto& a = cases[i];
      const auto& b = cases[j];
      if (a.gamma != b.gamma || a.gamma < 1.0) continue;
      const auto p = plan(pairs_per_case, seed);
      const bool factors_ok =
          ganfp::certify(a.T, ganfp::Property::GAN, {a.gamma, a.mu, std::nullopt},
                         ganfp::NormSpec::l2(), p)
              .passed() &&
          ganfp::certify(b.T, ganfp::Property::GAN, {b.gamma, b.mu, std::nullopt},
                         ganfp::NormSpec::l2(), p)
              .passed();
      if (!factors_ok) {
        o.pass = false;
        o.detail = "factor certificate failed";
        continue;
      }
      const double mu = ganfp::composition_mu(a.mu, b.mu, a.gamma);
      const auto comp = ganfp::compose(a.T, b.T);
      const auto cert =
          ganfp::certify(comp, ganfp::Property::GAN, {a.gamma, mu, std::nullopt},
                         ganfp::NormSpec::l2(), plan(pairs_per_case, seed + 7919));
      o.samples += cert.n_checked;
      o.worst = std::min(o.worst, cert.min_slack);
      if (!cert.passed()) {
        o.pass = false;
        o.detail = comp.label() + " failed";
      }
    }
  }
  return o;
}

/// Affine contractions certified GAN at exponent 1/2 pass the fixed-point
/// contraction check at their sampled ratio.
inline Outcome gan_below_one_is_fp_contractive(std::size_t pairs_per_case,
                                               std::uint64_t seed) {
  Outcome o;
  const Vector z = (Vector(2) << 2.0, -1.0).finished();
  for (double rho : {0.2, 0.5, 0.8, -0.6}) {
    const auto T = ganfp::affine_op(rho, z);
    const auto p = plan(pairs_per_case, seed);
    const auto gan = ganfp::certify(T, ganfp::Property::GAN,
                                    {0.5, ganfp::mu_hat(std::abs(rho), 0.5), std::nullopt},
                                    ganfp::NormSpec::l2(), p);
    if (!gan.passed()) {
      o.pass = false;
      o.detail = "GAN(1/2) certificate failed";
      continue;
    }
    const double ratio = ganfp::empirical_fp_ratio(T, ganfp::NormSpec::l2(), p);
    if (!(ratio < 1.0)) {
      o.pass = false;
      o.detail = "sampled ratio not below 1";
      continue;
    }
    const double r = std::min(ratio + 1e-6, 1.0 - 1e-6);
    const auto fp = ganfp::certify(T, ganfp::Property::FpContractive,
                                   {std::nullopt, std::nullopt, r}, ganfp::NormSpec::l2(), p);
    o.samples += fp.n_checked;
    o.worst = std::min(o.worst, fp.min_slack);
    if (!fp.passed()) o.pass = false;
  }
  return o;
}

}  // namespace props

#include "ganfp/certify.hpp"

#include "ganfp/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <thread>

namespace ganfp {

namespace {

constexpr const char* kEvidenceNote =
    "sampled evidence: failure to refute on the sampled pairs, not a proof";

struct MinSlack {
  double slack = std::numeric_limits<double>::infinity();
  std::size_t index = std::numeric_limits<std::size_t>::max();
  std::size_t evaluated = 0;
};

bool uses_fixed_point(Property p) {
  return p == Property::FpContractive || p == Property::HolderRegular;
}

Vector plan_center(const Operator& T, const SamplingPlan& plan) {
  if (plan.center) {
    if (plan.center->size() != T.dim()) {
      throw DimensionMismatch("sampling plan center",
                              static_cast<std::size_t>(T.dim()),
                              static_cast<std::size_t>(plan.center->size()));
    }
    return *plan.center;
  }
  if (T.fixed_point_hint()) return *T.fixed_point_hint();
  return Vector::Zero(T.dim());
}

// Minimum of `eval(i)` over [0, count), ties resolved by the lowest index.
// `eval` returns NaN to mark an index as skipped.
template <class Eval>
MinSlack parallel_min(std::size_t count, unsigned threads, const Eval& eval) {
  auto run = [&](std::size_t begin, std::size_t end) {
    MinSlack best;
    for (std::size_t i = begin; i < end; ++i) {
      const double s = eval(i);
      if (std::isnan(s)) continue;
      ++best.evaluated;
      if (s < best.slack) {
        best.slack = s;
        best.index = i;
      }
    }
    return best;
  };
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(threads, count));
  if (workers == 1) return run(0, count);

  std::vector<MinSlack> partial(workers);
  std::vector<std::thread> pool;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    pool.emplace_back([&, w, begin, end] { partial[w] = run(begin, end); });
  }
  for (auto& t : pool) t.join();

  MinSlack best;
  for (const auto& p : partial) {
    best.evaluated += p.evaluated;
    if (p.slack < best.slack ||
        (p.slack == best.slack && p.index < best.index)) {
      best.slack = p.slack;
      best.index = p.index;
    }
  }
  return best;
}

double require(const std::optional<double>& v, const char* name,
               Property p) {
  if (!v) {
    throw DomainError("certify " + to_string(p) + ": parameter '" + name +
                      "' is required");
  }
  if (!(*v > 0.0)) {
    throw DomainError("certify " + to_string(p) + ": parameter '" + name +
                      "' must be positive");
  }
  return *v;
}

}  // namespace

std::string to_string(Property p) {
  switch (p) {
    case Property::GAN:
      return "GAN";
    case Property::Nonexpansive:
      return "Nonexpansive";
    case Property::Contractive:
      return "Contractive";
    case Property::FpContractive:
      return "FpContractive";
    case Property::HolderRegular:
      return "HolderRegular";
  }
  return "unknown";
}

Property property_from_string(const std::string& s) {
  for (Property p : {Property::GAN, Property::Nonexpansive,
                     Property::Contractive, Property::FpContractive,
                     Property::HolderRegular}) {
    std::string name = to_string(p);
    std::string lower_name = name;
    std::string lower_s = s;
    std::transform(lower_name.begin(), lower_name.end(), lower_name.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    std::transform(lower_s.begin(), lower_s.end(), lower_s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    if (lower_name == lower_s) return p;
  }
  throw DomainError("unknown property '" + s + "'");
}

std::string to_string(Verdict v) { return v == Verdict::Pass ? "PASS" : "FAIL"; }

void SamplingPlan::validate() const {
  if (n_pairs < 1) throw DomainError("sampling plan: n_pairs must be >= 1");
  if (radius_scales.empty()) {
    throw DomainError("sampling plan: radius_scales is empty");
  }
  for (double r : radius_scales) {
    if (!(r > 0.0)) throw DomainError("sampling plan: radius scales must be > 0");
  }
}

double gan_slack(const Operator& T, const Vector& x, const Vector& y,
                 double gamma, double mu, const NormSpec& norm) {
  const Vector tx = T.apply(x);
  const Vector ty = T.apply(y);
  const double d = norm(x - y);
  const double dt = norm(tx - ty);
  const double dr = norm((x - tx) - (y - ty));
  return std::pow(d, gamma) - std::pow(dt, gamma) - mu * std::pow(dr, gamma);
}

double property_slack(const Operator& T, Property property,
                      const ClassParams& params, const NormSpec& norm,
                      const Vector& x, const Vector& y) {
  switch (property) {
    case Property::GAN:
      return gan_slack(T, x, y, require(params.gamma, "gamma", property),
                       require(params.mu, "mu", property), norm);
    case Property::Nonexpansive:
      return norm(x - y) - norm(T.apply(x) - T.apply(y));
    case Property::Contractive:
      return require(params.rho, "rho", property) * norm(x - y) -
             norm(T.apply(x) - T.apply(y));
    case Property::FpContractive:
      return require(params.rho, "rho", property) * norm(x - y) -
             norm(T.apply(x) - y);
    case Property::HolderRegular: {
      const double gamma = require(params.gamma, "gamma", property);
      const double mu = require(params.mu, "mu", property);
      return mu * std::pow(norm(x - T.apply(x)), gamma) - norm(x - y);
    }
  }
  return std::numeric_limits<double>::quiet_NaN();
}

std::vector<std::pair<Vector, Vector>> sample_pairs(const Operator& T,
                                                    const SamplingPlan& plan) {
  plan.validate();
  const Eigen::Index n = T.dim();
  const Vector c = plan_center(T, plan);
  const auto& hint = T.fixed_point_hint();

  std::mt19937_64 rng(plan.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto gaussian = [&] {
    Vector g(n);
    for (Eigen::Index i = 0; i < n; ++i) g(i) = normal(rng);
    return g;
  };

  std::vector<std::pair<Vector, Vector>> pairs;
  pairs.reserve(plan.total());
  for (double r : plan.radius_scales) {
    for (std::size_t i = 0; i < plan.n_pairs; ++i) {
      const Vector g1 = gaussian();
      const Vector g2 = gaussian();
      Vector x = c + r * g1;
      Vector y;
      switch (i % 4) {
        case 2:
          y = 2.0 * c - x;
          break;
        case 3:
          y = hint ? *hint : Vector(c + r * g2);
          break;
        default:
          y = c + r * g2;
          break;
      }
      pairs.emplace_back(std::move(x), std::move(y));
    }
  }
  return pairs;
}

GanCertificate certify(const Operator& T, Property property,
                       const ClassParams& params, const NormSpec& norm,
                       const SamplingPlan& plan, double tol) {
  if (uses_fixed_point(property) && !T.fixed_point_hint()) {
    throw DomainError("certify " + to_string(property) + ": operator '" +
                      T.label() + "' has no fixed-point hint");
  }
  // Validate parameters once up front so worker threads never throw.
  switch (property) {
    case Property::GAN:
    case Property::HolderRegular:
      require(params.gamma, "gamma", property);
      require(params.mu, "mu", property);
      break;
    case Property::Contractive:
    case Property::FpContractive:
      require(params.rho, "rho", property);
      break;
    case Property::Nonexpansive:
      break;
  }

  auto pairs = sample_pairs(T, plan);
  if (uses_fixed_point(property)) {
    for (auto& p : pairs) p.second = *T.fixed_point_hint();
  }

  const auto eval = [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    if (property == Property::FpContractive &&
        norm(T.apply(x) - x) <= kQuotientCutoff * std::max(1.0, norm(x))) {
      return std::numeric_limits<double>::quiet_NaN();  // x is fixed
    }
    return property_slack(T, property, params, norm, x, y);
  };
  const MinSlack best = parallel_min(pairs.size(), plan.threads, eval);

  GanCertificate cert;
  cert.property = property;
  cert.norm = norm;
  cert.tol = tol;
  cert.operator_label = T.label();
  cert.n_checked = best.evaluated;
  if (property == Property::GAN || property == Property::HolderRegular) {
    cert.gamma = params.gamma;
    cert.mu = params.mu;
  } else if (property != Property::Nonexpansive) {
    cert.rho = params.rho;
  }
  cert.notes.emplace_back(kEvidenceNote);
  if (best.evaluated == 0) {
    cert.min_slack = 0.0;
    cert.verdict = Verdict::Pass;
    cert.notes.emplace_back("no informative samples (all points fixed)");
    return cert;
  }
  cert.min_slack = best.slack;
  cert.witness = pairs[best.index];
  cert.verdict = best.slack >= -tol ? Verdict::Pass : Verdict::Fail;
  return cert;
}

double estimate_mu(const Operator& T, double gamma, const NormSpec& norm,
                   const SamplingPlan& plan) {
  if (!(gamma > 0.0)) throw DomainError("estimate_mu: gamma must be positive");
  const auto pairs = sample_pairs(T, plan);
  const auto eval = [&](std::size_t i) {
    const auto& [x, y] = pairs[i];
    const Vector tx = T.apply(x);
    const Vector ty = T.apply(y);
    const double dr = norm((x - tx) - (y - ty));
    const double scale = std::max({1.0, norm(x), norm(y)});
    if (dr <= kQuotientCutoff * scale) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return (std::pow(norm(x - y), gamma) - std::pow(norm(tx - ty), gamma)) /
           std::pow(dr, gamma);
  };
  const MinSlack best = parallel_min(pairs.size(), plan.threads, eval);
  if (best.evaluated == 0) {
    throw DomainError("estimate_mu: every sampled pair was skipped (operator "
                      "is indistinguishable from the identity on samples)");
  }
  return best.slack <= 0.0 ? 0.0 : best.slack;
}

double empirical_fp_ratio(const Operator& T, const NormSpec& norm,
                          const SamplingPlan& plan) {
  if (!T.fixed_point_hint()) {
    throw DomainError("empirical_fp_ratio: operator has no fixed-point hint");
  }
  const Vector& xhat = *T.fixed_point_hint();
  const auto pairs = sample_pairs(T, plan);
  // Negated so parallel_min yields the maximum ratio.
  const auto eval = [&](std::size_t i) {
    const Vector& x = pairs[i].first;
    const Vector tx = T.apply(x);
    if (norm(tx - x) <= kQuotientCutoff * std::max(1.0, norm(x))) {
      return std::numeric_limits<double>::quiet_NaN();
    }
    return -norm(tx - xhat) / norm(x - xhat);
  };
  const MinSlack best = parallel_min(pairs.size(), plan.threads, eval);
  if (best.evaluated == 0) {
    throw DomainError("empirical_fp_ratio: every sampled point is fixed");
  }
  return -best.slack;
}

GammaEstimate estimate_min_gamma(const Operator& T, double mu,
                                 const NormSpec& norm, const SamplingPlan& plan,
                                 double lo, double hi, double width,
                                 double tol) {
  if (!(mu > 0.0)) throw DomainError("estimate_min_gamma: mu must be positive");
  if (!(lo > 0.0) || !(hi > lo)) {
    throw DomainError("estimate_min_gamma: need 0 < lo < hi");
  }
  auto at = [&](double gamma) {
    return certify(T, Property::GAN, {gamma, mu, std::nullopt}, norm, plan,
                   tol);
  };
  GanCertificate upper = at(hi);
  if (!upper.passed()) {
    throw DomainError("estimate_min_gamma: certify fails at the upper bracket");
  }
  if (at(lo).passed()) {
    throw DomainError("estimate_min_gamma: certify passes at the lower bracket");
  }
  while (hi - lo > width) {
    const double mid = 0.5 * (lo + hi);
    GanCertificate c = at(mid);
    if (c.passed()) {
      hi = mid;
      upper = std::move(c);
    } else {
      lo = mid;
    }
  }
  if (mu < 1.0) {
    upper.notes.emplace_back(
        "bisection assumes validity is monotone in gamma; this is only "
        "guaranteed for mu >= 1 and is a sampling heuristic here");
  }
  return {hi, std::move(upper)};
}

double psi(double alpha, double gamma) {
  if (!(alpha >= 0.0) || !(alpha < 1.0)) {
    throw DomainError("psi: alpha must lie in [0, 1)");
  }
  if (!(gamma > 0.0)) throw DomainError("psi: gamma must be positive");
  return (1.0 - std::pow(alpha, gamma)) / std::pow(1.0 - alpha, gamma);
}

double mu_hat(double rho, double gamma) {
  if (!(rho > 0.0) || !(rho < 1.0)) {
    throw DomainError("mu_hat: rho must lie in (0, 1)");
  }
  if (!(gamma > 0.0)) throw DomainError("mu_hat: gamma must be positive");
  return (1.0 - std::pow(rho, gamma)) / std::pow(1.0 + rho, gamma);
}

double composition_mu(double mu1, double mu2, double gamma) {
  if (!(gamma >= 1.0)) {
    throw DomainError("composition_mu: gamma must be >= 1");
  }
  if (!(mu1 > 0.0) || !(mu2 > 0.0)) {
    throw DomainError("composition_mu: mu1 and mu2 must be positive");
  }
  return std::pow(2.0, 1.0 - gamma) * std::min(mu1, mu2);
}

Eigen::Vector2d RegionGrid::cell_center(std::size_t row,
                                        std::size_t col) const {
  const double hx = (x_max - x_min) / static_cast<double>(nx);
  const double hy = (y_max - y_min) / static_cast<double>(ny);
  // Offsets are half-integers measured from the middle, so mirrored cells
  // get exactly negated offsets.
  const double ox = static_cast<double>(col) + 0.5 - 0.5 * static_cast<double>(nx);
  const double oy = static_cast<double>(row) + 0.5 - 0.5 * static_cast<double>(ny);
  return {xhat.x() + ox * hx, xhat.y() + oy * hy};
}

double region_slack(const Eigen::Vector2d& y, const Eigen::Vector2d& x,
                    const Eigen::Vector2d& xhat, double gamma, double mu) {
  return std::pow((x - xhat).norm(), gamma) -
         std::pow((y - xhat).norm(), gamma) - mu * std::pow((y - x).norm(), gamma);
}

RegionGrid range_region(const Eigen::Vector2d& x, const Eigen::Vector2d& xhat,
                        double gamma, double mu, std::size_t resolution) {
  if (!(gamma > 0.0) || !(mu > 0.0)) {
    throw DomainError("range_region: gamma and mu must be positive");
  }
  if (resolution == 0) throw DomainError("range_region: resolution must be > 0");
  const double r = (x - xhat).norm();
  if (r == 0.0) throw DomainError("range_region: x must differ from xhat");

  RegionGrid grid;
  grid.x = x;
  grid.xhat = xhat;
  grid.gamma = gamma;
  grid.mu = mu;
  grid.x_min = xhat.x() - r;
  grid.x_max = xhat.x() + r;
  grid.y_min = xhat.y() - r;
  grid.y_max = xhat.y() + r;
  grid.nx = resolution;
  grid.ny = resolution;
  grid.cells.assign(resolution * resolution, 0);
  for (std::size_t row = 0; row < grid.ny; ++row) {
    for (std::size_t col = 0; col < grid.nx; ++col) {
      const Eigen::Vector2d y = grid.cell_center(row, col);
      grid.cells[row * grid.nx + col] =
          region_slack(y, x, xhat, gamma, mu) >= 0.0 ? 1 : 0;
    }
  }
  return grid;
}

}  // namespace ganfp

#include "ganfp/iterate.hpp"

#include "ganfp/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace ganfp {

namespace {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

LineFit least_squares_line(const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = xs[i] - mx;
    const double dy = ys[i] - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  if (syy == 0.0) {
    fit.r_squared = 1.0;
  } else {
    double sse = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
      sse += e * e;
    }
    fit.r_squared = std::clamp(1.0 - sse / syy, 0.0, 1.0);
  }
  return fit;
}

std::size_t positive_prefix(const std::vector<double>& seq, std::size_t from) {
  std::size_t end = from;
  while (end < seq.size() && seq[end] > 0.0) ++end;
  return end;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

}  // namespace

std::string to_string(StopReason r) {
  switch (r) {
    case StopReason::ResidualTol:
      return "ResidualTol";
    case StopReason::MaxIter:
      return "MaxIter";
    case StopReason::Diverged:
      return "Diverged";
  }
  return "unknown";
}

std::string to_string(RateModel m) {
  return m == RateModel::Polynomial ? "Polynomial" : "Exponential";
}

RateModel rate_model_from_string(const std::string& s) {
  const std::string l = lower(s);
  if (l == "polynomial") return RateModel::Polynomial;
  if (l == "exponential") return RateModel::Exponential;
  throw DomainError("unknown rate model '" + s + "'");
}

std::string to_string(TailMode m) {
  switch (m) {
    case TailMode::Absorbed:
      return "Absorbed";
    case TailMode::Exponential:
      return "Exponential";
    case TailMode::Inconclusive:
      return "Inconclusive";
  }
  return "unknown";
}

IterationTrace picard(const Operator& T, const Vector& x0,
                      std::size_t max_iter, double res_tol,
                      const std::optional<Vector>& ref, const NormSpec& norm,
                      std::size_t iterate_cap) {
  if (max_iter < 1) throw DomainError("picard: max_iter must be >= 1");
  if (!(res_tol >= 0.0)) throw DomainError("picard: res_tol must be >= 0");
  if (x0.size() != T.dim()) {
    throw DimensionMismatch("picard initial vector",
                            static_cast<std::size_t>(T.dim()),
                            static_cast<std::size_t>(x0.size()));
  }
  if (ref && ref->size() != T.dim()) {
    throw DimensionMismatch("picard reference",
                            static_cast<std::size_t>(T.dim()),
                            static_cast<std::size_t>(ref->size()));
  }

  IterationTrace trace;
  trace.label = T.label();
  trace.norm = norm;
  trace.x0 = x0;
  trace.res_tol = res_tol;
  trace.reference = ref;
  const auto dim = static_cast<std::size_t>(T.dim());
  if (dim <= iterate_cap) trace.iterates.emplace().push_back(x0);
  if (ref) trace.errors_to_ref.emplace().push_back(norm(x0 - *ref));

  Vector x = x0;
  double first_residual = 0.0;
  for (std::size_t k = 0; k < max_iter; ++k) {
    Vector next = T.apply(x);
    if (!next.allFinite()) throw NonFiniteIterate(k + 1);
    const double r = norm(next - x);
    if (!std::isfinite(r)) throw NonFiniteIterate(k + 1);
    trace.residuals.push_back(r);
    x = std::move(next);
    if (trace.iterates) {
      if ((trace.iterates->size() + 1) * dim <= iterate_cap) {
        trace.iterates->push_back(x);
      } else {
        trace.iterates.reset();
      }
    }
    if (ref) trace.errors_to_ref->push_back(norm(x - *ref));
    if (k == 0) first_residual = r;

    if (r <= res_tol) {
      trace.stop_reason = StopReason::ResidualTol;
      break;
    }
    if (r > kDivergenceFactor * (1.0 + first_residual)) {
      trace.stop_reason = StopReason::Diverged;
      break;
    }
  }
  trace.k_final = trace.residuals.size();
  trace.x_final = std::move(x);
  return trace;
}

RateFit fit_rate(const std::vector<double>& seq, RateModel model,
                 std::size_t tail_start) {
  const std::size_t end = positive_prefix(seq, std::min(tail_start, seq.size()));
  if (end < tail_start + 5) {
    throw DomainError("fit_rate: tail has fewer than 5 positive points");
  }
  std::vector<double> xs, ys;
  for (std::size_t i = tail_start; i < end; ++i) {
    const double k = static_cast<double>(i + 1);
    xs.push_back(model == RateModel::Polynomial ? std::log(k) : k);
    ys.push_back(std::log(seq[i]));
  }
  const LineFit line = least_squares_line(xs, ys);
  RateFit fit;
  fit.model = model;
  fit.tail_start = tail_start;
  fit.n_points = xs.size();
  fit.r_squared = line.r_squared;
  fit.log_constant = line.intercept;
  if (model == RateModel::Polynomial) {
    fit.exponent_p = -line.slope;
  } else {
    fit.rho = std::exp(line.slope);
  }
  return fit;
}

RateFit fit_rate(const std::vector<double>& seq, RateModel model) {
  return fit_rate(seq, model, seq.size() / 2);
}

LittleOReport little_o_proxy(const std::vector<double>& seq, double exponent) {
  LittleOReport report;
  report.exponent = exponent;
  const std::size_t end = positive_prefix(seq, 0);
  const std::size_t start = end / 2;
  if (end - start < 5) {
    throw DomainError("little_o_proxy: fewer than 5 points in the final half");
  }
  std::vector<double> ks, values;
  for (std::size_t i = start; i < end; ++i) {
    const double k = static_cast<double>(i + 1);
    ks.push_back(k);
    values.push_back(std::pow(k, exponent) * seq[i]);
  }
  report.slope = least_squares_line(ks, values).slope;
  report.first = values.front();
  report.last = values.back();
  report.window_start = start;
  report.n_points = values.size();
  report.pass = report.slope < 0.0 && report.last <= 0.5 * report.first;
  return report;
}

SummabilityReport check_residual_summability(const IterationTrace& trace,
                                             double gamma, double mu,
                                             const Vector& xhat, double tol) {
  if (!(gamma > 0.0) || !(mu > 0.0)) {
    throw DomainError("check_residual_summability: gamma, mu must be positive");
  }
  SummabilityReport report;
  report.bound = std::pow(trace.norm(trace.x0 - xhat), gamma);
  report.tol = tol * std::max(1.0, report.bound);
  report.max_excess = -report.bound;
  double sum = 0.0;
  for (double r : trace.residuals) {
    sum += mu * std::pow(r, gamma);
    report.partial_sums.push_back(sum);
    report.max_excess = std::max(report.max_excess, sum - report.bound);
  }
  report.pass = report.max_excess <= report.tol;
  return report;
}

SandwichReport check_sandwich(const IterationTrace& trace, const Vector& xstar,
                              double mu, double tol) {
  if (trace.stop_reason != StopReason::ResidualTol) {
    throw DomainError("check_sandwich: trace did not converge (" +
                      to_string(trace.stop_reason) + ")");
  }
  const std::size_t K = trace.k_final;
  std::vector<double> errors;
  if (trace.iterates) {
    for (const Vector& x : *trace.iterates) errors.push_back(trace.norm(x - xstar));
  } else if (trace.errors_to_ref && trace.reference &&
             (*trace.reference - xstar).norm() == 0.0) {
    errors = *trace.errors_to_ref;
  } else {
    throw DomainError("check_sandwich: trace keeps neither iterates nor "
                      "errors against this solution");
  }

  SandwichReport report;
  report.tol = tol;
  const double r_last = K > 0 ? trace.residuals.back() : 0.0;
  if (r_last == 0.0) {
    report.tail_mode = TailMode::Absorbed;
  } else {
    try {
      const RateFit fit = fit_rate(trace.residuals, RateModel::Exponential);
      if (fit.r_squared >= 0.99 && fit.rho < 1.0) {
        report.tail_mode = TailMode::Exponential;
        report.remainder = r_last * fit.rho / (1.0 - fit.rho);
      }
    } catch (const DomainError&) {
      // Too few points to fit: leave the tail inconclusive.
    }
  }
  report.upper_conclusive = report.tail_mode != TailMode::Inconclusive;

  // Tail sums S_k = sum_{j=k}^{K-1} r_j + remainder, built backwards.
  std::vector<double> tail(K + 1);
  tail[K] = report.remainder;
  for (std::size_t j = K; j-- > 0;) tail[j] = tail[j + 1] + trace.residuals[j];

  report.lower_worst = std::numeric_limits<double>::infinity();
  report.upper_worst = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k <= K; ++k) {
    const double lower = errors[k] - mu * tail[k];
    const double upper = tail[k] - errors[k];
    if (lower < report.lower_worst) {
      report.lower_worst = lower;
      report.lower_worst_k = k;
    }
    if (upper < report.upper_worst) {
      report.upper_worst = upper;
      report.upper_worst_k = k;
    }
  }
  report.lower_pass = report.lower_worst >= -tol;
  report.upper_pass = report.upper_conclusive && report.upper_worst >= -tol;
  report.pass = report.lower_pass && report.upper_pass;
  return report;
}

double recurrence_bound(double aK, double p, const std::vector<double>& b,
                        std::size_t K, std::size_t k) {
  if (!(k > K)) throw DomainError("recurrence_bound: need k > K");
  if (aK < 0.0) throw DomainError("recurrence_bound: aK must be >= 0");
  if (p < 0.0) throw DomainError("recurrence_bound: p must be >= 0");
  if (b.size() < k) throw DomainError("recurrence_bound: b is too short");
  if (aK == 0.0) return 0.0;
  double sum = 0.0;
  for (std::size_t j = K; j < k; ++j) {
    if (b[j] < 0.0) throw DomainError("recurrence_bound: b_j must be >= 0");
    sum += b[j];
  }
  if (p == 0.0) return aK * std::exp(-sum);
  return std::pow(std::pow(aK, -p) + p * sum, -1.0 / p);
}

RecurrenceReport verify_recurrence_bound(const std::vector<double>& seq,
                                         double p, double mu, double tol) {
  if (p < 0.0 || !(mu > 0.0)) {
    throw DomainError("verify_recurrence_bound: need p >= 0 and mu > 0");
  }
  RecurrenceReport report;
  if (seq.size() < 2) {
    report.pass = true;
    return report;
  }
  const std::vector<double> b(seq.size(), mu);
  std::size_t K = 0;
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    ++report.premise_checks;
    const double a = seq[k];
    const double factor = p == 0.0 ? 1.0 - mu : 1.0 - mu * std::pow(a, p);
    if (!(seq[k + 1] <= a * factor + tol)) {
      ++report.premise_violations;
      if (!report.first_premise_violation) report.first_premise_violation = k;
      K = k + 1;
      continue;
    }
    ++report.bound_checks;
    const double bound = recurrence_bound(seq[K], p, b, K, k + 1);
    if (!(seq[k + 1] <= bound + tol)) {
      ++report.bound_violations;
      if (!report.first_bound_violation) report.first_bound_violation = k + 1;
    }
  }
  report.pass = report.bound_violations == 0;
  return report;
}

}  // namespace ganfp

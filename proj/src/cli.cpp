#include "ganfp/cli.hpp"

#include "ganfp/certify.hpp"
#include "ganfp/iterate.hpp"
#include "ganfp/problems.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <random>
#include <sstream>

namespace ganfp {

namespace fs = std::filesystem;

std::string to_string(Command c) {
  switch (c) {
    case Command::Certify:
      return "certify";
    case Command::Solve:
      return "solve";
    case Command::Rates:
      return "rates";
    case Command::Region:
      return "region";
  }
  return "unknown";
}

Command command_from_string(const std::string& s) {
  if (s == "certify") return Command::Certify;
  if (s == "solve") return Command::Solve;
  if (s == "rates") return Command::Rates;
  if (s == "region") return Command::Region;
  throw UsageError("command", "unknown command '" + s + "'");
}

namespace {

constexpr double kDefaultTol = 1e-10;
constexpr std::size_t kDefaultMaxIter = 10000;
constexpr std::size_t kDefaultResolution = 201;

/// Typed access to one JSON object whose fields are reported as
/// "<prefix>.<key>" in errors.
class Fields {
 public:
  Fields(const Json& j, std::string prefix, fs::path base)
      : j_(j), prefix_(std::move(prefix)), base_(std::move(base)) {
    if (!j_.is_object()) throw UsageError(prefix_, "expected a JSON object");
  }

  std::string name(const std::string& key) const { return prefix_ + "." + key; }

  bool has(const std::string& key) const {
    return j_.contains(key) && !j_.at(key).is_null();
  }

  const Json& at(const std::string& key) const {
    if (!has(key)) throw UsageError(name(key), "missing required field");
    return j_.at(key);
  }

  double number(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number()) throw UsageError(name(key), "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw UsageError(name(key), "must be finite");
    return d;
  }

  double number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) const {
    if (!has(key)) return std::nullopt;
    return number(key);
  }

  double positive(const std::string& key) const {
    const double d = number(key);
    if (!(d > 0.0)) throw UsageError(name(key), "must be positive");
    return d;
  }

  std::uint64_t count(const std::string& key) const {
    const Json& v = at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      throw UsageError(name(key), "expected a non-negative integer");
    }
    return v.get<std::uint64_t>();
  }

  std::uint64_t count_or(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? count(key) : fallback;
  }

  std::string string_or(const std::string& key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_string()) throw UsageError(name(key), "expected a string");
    return v.get<std::string>();
  }

  Matrix matrix(const std::string& key) const {
    const Json& v = at(key);
    if (v.is_string()) {
      try {
        return load_matrix((base_ / v.get<std::string>()).string());
      } catch (const std::exception& e) {
        throw UsageError(name(key), e.what());
      }
    }
    if (!v.is_array() || v.empty()) {
      throw UsageError(name(key), "expected a file path or an array of rows");
    }
    const auto rows = static_cast<Eigen::Index>(v.size());
    if (!v[0].is_array() || v[0].empty()) {
      throw UsageError(name(key), "expected an array of rows");
    }
    const auto cols = static_cast<Eigen::Index>(v[0].size());
    Matrix M(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      const Json& row = v[static_cast<std::size_t>(r)];
      if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
        throw UsageError(name(key), "rows must all have " + std::to_string(cols) + " entries");
      }
      for (Eigen::Index c = 0; c < cols; ++c) {
        const Json& e = row[static_cast<std::size_t>(c)];
        if (!e.is_number()) throw UsageError(name(key), "entries must be numbers");
        M(r, c) = e.get<double>();
      }
    }
    return M;
  }

  Vector vector(const std::string& key) const {
    const Json& v = at(key);
    if (v.is_string()) {
      const Matrix M = matrix(key);
      if (M.cols() == 1) return M.col(0);
      if (M.rows() == 1) return M.row(0).transpose();
      throw UsageError(name(key), "file must hold a single row or column");
    }
    if (!v.is_array()) throw UsageError(name(key), "expected a file path or an array");
    Vector out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw UsageError(name(key), "entries must be numbers");
      out(static_cast<Eigen::Index>(i)) = v[i].get<double>();
    }
    return out;
  }

  const Json& raw() const { return j_; }

 private:
  const Json& j_;
  std::string prefix_;
  fs::path base_;
};

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  Matrix M(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < cols; ++c) M(r, c) = dist(rng);
  }
  return M;
}

Matrix difference_matrix(Eigen::Index n) {
  Matrix D = Matrix::Zero(n - 1, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    D(i, i) = -1.0;
    D(i, i + 1) = 1.0;
  }
  return D;
}

/// A and b either given explicitly or drawn from {"random": {rows, cols, seed}}.
std::pair<Matrix, Vector> data_matrix(const Fields& f) {
  if (f.has("random")) {
    const Fields r(f.raw().at("random"), f.name("random"), ".");
    const auto rows = static_cast<Eigen::Index>(r.count("rows"));
    const auto cols = static_cast<Eigen::Index>(r.count("cols"));
    if (rows == 0 || cols == 0) throw UsageError(r.name("rows"), "dimensions must be positive");
    std::mt19937_64 rng(r.count_or("seed", 1));
    Matrix A = gaussian_matrix(rows, cols, rng);
    Vector b = gaussian_matrix(rows, 1, rng).col(0);
    return {std::move(A), std::move(b)};
  }
  Matrix A = f.matrix("A");
  Vector b = f.vector("b");
  if (b.size() != A.rows()) {
    throw UsageError(f.name("b"), "length " + std::to_string(b.size()) +
                                      " does not match A rows " + std::to_string(A.rows()));
  }
  return {std::move(A), std::move(b)};
}

double problem_lambda(const Fields& problem, const Fields& params) {
  if (params.has("lambda")) return params.number("lambda");
  return problem.number("lambda");
}

ProblemSpec build_problem(const Json& j, const fs::path& base, const Fields& params) {
  const Fields f(j, "problem", base);
  const std::string kind = f.string_or("kind", "");
  try {
    if (kind == "least_squares") {
      auto [A, b] = data_matrix(f);
      return least_squares_problem(A, b);
    }
    if (kind == "lasso") {
      auto [A, b] = data_matrix(f);
      return lasso_problem(A, b, problem_lambda(f, params));
    }
    if (kind == "separable_l1") {
      return separable_smooth_l1_problem(f.vector("coeffs"), f.vector("b"),
                                         problem_lambda(f, params));
    }
    if (kind == "analysis_l1") {
      auto [A, b] = data_matrix(f);
      Matrix B;
      if (f.has("B") && f.at("B").is_object()) {
        const Fields bf(f.at("B"), f.name("B"), base);
        if (bf.string_or("type", "") != "difference") {
          throw UsageError(bf.name("type"), "only \"difference\" is supported");
        }
        if (A.cols() < 2) throw UsageError(f.name("B"), "difference needs n >= 2");
        B = difference_matrix(A.cols());
      } else {
        B = f.matrix("B");
      }
      return analysis_l1_problem(A, b, B, problem_lambda(f, params));
    }
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError("problem", e.what());
  }
  throw UsageError("problem.kind",
                   "expected least_squares, lasso, separable_l1 or analysis_l1");
}

Operator build_operator(const Json& j, const fs::path& base) {
  const Fields f(j, "operator", base);
  const std::string kind = f.string_or("kind", "");
  const auto dim = static_cast<Eigen::Index>(f.count_or("dim", 1));
  if (dim == 0) throw UsageError(f.name("dim"), "must be positive");
  if (kind == "soft_threshold" || kind == "block_soft_threshold") {
    const double lambda = f.number("lambda");
    if (lambda < 0.0) throw UsageError(f.name("lambda"), "must be >= 0");
    const ProxFamily prox = kind == "soft_threshold" ? prox_l1(lambda) : prox_l2(lambda);
    return prox_op(prox, 1.0, dim, kind).with_hint(Vector::Zero(dim));
  }
  if (kind == "affine") {
    const Vector z = f.vector("z");
    if (z.size() == 0) throw UsageError(f.name("z"), "must be non-empty");
    return affine_op(f.number("alpha"), z);
  }
  if (kind == "identity") return identity_op(dim);
  throw UsageError("operator.kind",
                   "expected soft_threshold, block_soft_threshold, affine or identity");
}

struct Setup {
  std::optional<ProblemSpec> problem;
  double beta = 0.0;
  std::optional<double> eta;
  Operator T;
};

Setup setup_problem(const RunConfig& cfg, const Fields& params) {
  ProblemSpec problem = build_problem(*cfg.problem, cfg.base_dir, params);
  const double beta = params.has("beta") ? params.positive("beta") : default_beta(problem);
  std::optional<double> eta;
  if (problem.kind == ProblemKind::AnalysisL1PrimalDual) {
    if (params.has("eta")) {
      eta = params.positive("eta");
    } else {
      if (!(beta < 2.0 / problem.L)) {
        throw UsageError("params.beta", "must be below 2/L to derive a default eta");
      }
      eta = default_eta(problem, beta);
    }
  }
  try {
    Operator T = default_operator(problem, beta, eta);
    return Setup{std::move(problem), beta, eta, std::move(T)};
  } catch (const Error& e) {
    throw UsageError("params", e.what());
  }
}

Setup setup(const RunConfig& cfg, const Fields& params) {
  if (cfg.problem) return setup_problem(cfg, params);
  return Setup{std::nullopt, 0.0, std::nullopt, build_operator(*cfg.op, cfg.base_dir)};
}

NormSpec select_norm(const Setup& s, const Fields& params) {
  const std::string name = params.string_or("norm", "l2");
  if (name == "l2") return NormSpec::l2();
  if (name == "l1") return NormSpec::l1();
  if (name == "weighted") {
    if (!s.problem || !s.problem->B || !s.eta) {
      throw UsageError("params.norm", "weighted norm needs an analysis_l1 problem");
    }
    return NormSpec::weighted(build_W(s.beta, *s.eta, *s.problem->B));
  }
  throw UsageError("params.norm", "expected l2, l1 or weighted");
}

SamplingPlan sampling_plan(const Fields& params) {
  SamplingPlan plan;
  plan.n_pairs = params.count_or("n_pairs", plan.n_pairs);
  if (plan.n_pairs == 0) throw UsageError("params.n_pairs", "must be >= 1");
  plan.seed = params.count_or("seed", plan.seed);
  plan.threads = static_cast<unsigned>(params.count_or("threads", 1));
  if (params.has("radius_scales")) {
    const Vector r = params.vector("radius_scales");
    plan.radius_scales.assign(r.data(), r.data() + r.size());
  }
  try {
    plan.validate();
  } catch (const Error& e) {
    throw UsageError("params", e.what());
  }
  return plan;
}

Vector start_point(const Fields& params, Eigen::Index dim) {
  if (!params.has("x0")) return Vector::Zero(dim);
  const Vector x0 = params.vector("x0");
  if (x0.size() != dim) {
    throw UsageError("params.x0", "expected " + std::to_string(dim) + " entries");
  }
  return x0;
}

std::vector<std::string> run_header(const RunConfig& cfg, const Setup& s) {
  std::vector<std::string> h;
  h.push_back("command: " + to_string(cfg.command));
  if (s.problem) {
    h.push_back("problem: " + to_string(s.problem->kind));
    h.push_back("beta: " + format_double(s.beta));
    if (s.eta) h.push_back("eta: " + format_double(*s.eta));
  }
  return h;
}

int trace_exit(const IterationTrace& t) {
  return t.stop_reason == StopReason::ResidualTol ? 0 : 2;
}

RunResult run_certify(const RunConfig& cfg, const Fields& params) {
  Setup s = setup(cfg, params);
  const NormSpec norm = select_norm(s, params);
  Property property;
  try {
    property = property_from_string(params.string_or("property", "gan"));
  } catch (const Error& e) {
    throw UsageError("params.property", e.what());
  }
  SamplingPlan plan = sampling_plan(params);

  ClassParams cp;
  cp.gamma = params.optional_number("gamma");
  cp.mu = params.optional_number("mu");
  cp.rho = params.optional_number("rho");
  std::vector<std::string> extra_notes;
  if (property == Property::GAN) {
    if (!cp.gamma) throw UsageError("params.gamma", "required for property gan");
    if (!cp.mu) {
      cp.mu = estimate_mu(s.T, *cp.gamma, norm, plan);
      extra_notes.push_back("mu estimated from samples");
    }
  }
  if (property == Property::HolderRegular) {
    if (!cp.gamma) throw UsageError("params.gamma", "required for property holder_regular");
    if (!cp.mu) throw UsageError("params.mu", "required for property holder_regular");
  }
  if (property == Property::Contractive || property == Property::FpContractive) {
    if (!cp.rho) throw UsageError("params.rho", "required for this property");
  }
  const bool needs_hint =
      property == Property::FpContractive || property == Property::HolderRegular;
  if (needs_hint && !s.T.fixed_point_hint()) {
    if (!s.problem) throw UsageError("operator", "operator has no known fixed point");
    const ReferenceSolution ref =
        reference_solution(*s.problem, params.number_or("tol", kDefaultTol), s.beta, s.eta);
    s.T = s.T.with_hint(ref.state);
    extra_notes.push_back("fixed point taken from a reference run");
  }

  GanCertificate cert;
  try {
    cert = certify(s.T, property, cp, norm, plan, params.number_or("slack_tol", kDefaultSlackTol));
  } catch (const UsageError&) {
    throw;
  } catch (const DomainError& e) {
    throw UsageError("params", e.what());
  }
  cert.notes.insert(cert.notes.end(), extra_notes.begin(), extra_notes.end());

  RunResult res;
  const fs::path file = cfg.output_dir / "certificate.json";
  write_json(certificate_json(cert), file.string());
  res.files.push_back(file);
  res.exit_code = cert.passed() ? 0 : 2;
  res.message = to_string(property) + " " + to_string(cert.verdict) +
                " (min_slack " + format_double(cert.min_slack) + ")";
  return res;
}

RunResult run_solve(const RunConfig& cfg, const Fields& params) {
  const Setup s = setup(cfg, params);
  const NormSpec norm = select_norm(s, params);
  const Vector x0 = start_point(params, s.T.dim());
  std::optional<Vector> ref;
  if (s.problem && s.problem->exact_solution && s.T.dim() == s.problem->n) {
    ref = *s.problem->exact_solution;
  }
  const double tol = params.number_or("tol", kDefaultTol);
  const auto max_iter = params.count_or("max_iter", kDefaultMaxIter);
  const IterationTrace trace = picard(s.T, x0, max_iter, tol, ref, norm, 0);

  RunResult res;
  const fs::path csv = cfg.output_dir / "trace.csv";
  write_trace_csv(trace, csv.string(), run_header(cfg, s));
  Json summary;
  summary["operator"] = trace.label;
  summary["norm"] = norm.name();
  summary["stop_reason"] = to_string(trace.stop_reason);
  summary["k_final"] = trace.k_final;
  summary["final_residual"] = trace.residuals.empty() ? 0.0 : trace.residuals.back();
  summary["x_final"] = to_json(trace.x_final);
  if (trace.errors_to_ref) summary["final_error_to_ref"] = trace.errors_to_ref->back();
  const fs::path json = cfg.output_dir / "summary.json";
  write_json(summary, json.string());
  res.files = {csv, json};
  res.exit_code = trace_exit(trace);
  res.message = "stopped: " + to_string(trace.stop_reason) + " after " +
                std::to_string(trace.k_final) + " steps";
  return res;
}

RunResult run_rates(const RunConfig& cfg, const Fields& params) {
  if (!cfg.problem) throw UsageError("problem", "rates requires a problem config");
  const Setup s = setup(cfg, params);
  const NormSpec norm = select_norm(s, params);
  const double tol = params.number_or("tol", kDefaultTol);
  const auto max_iter = params.count_or("max_iter", kDefaultMaxIter);
  const Vector x0 = start_point(params, s.T.dim());

  const ReferenceSolution ref = reference_solution(*s.problem, tol, s.beta, s.eta);
  const IterationTrace trace = picard(s.T, x0, max_iter, tol, ref.state, norm, 0);

  RunResult res;
  const fs::path csv = cfg.output_dir / "trace.csv";
  write_trace_csv(trace, csv.string(), run_header(cfg, s));
  res.files.push_back(csv);
  if (trace.stop_reason == StopReason::Diverged) {
    res.exit_code = 2;
    res.message = "iteration diverged";
    return res;
  }

  const std::string default_model =
      s.problem->kind == ProblemKind::LeastSquares ? "exponential" : "polynomial";
  RateModel model;
  try {
    model = rate_model_from_string(params.string_or("model", default_model));
  } catch (const Error& e) {
    throw UsageError("params.model", e.what());
  }
  Json fit;
  try {
    fit = fit_json(fit_rate(trace.residuals, model));
  } catch (const Error& e) {
    fit = {{"model", to_string(model)}, {"error", e.what()}};
  }
  const fs::path fit_path = cfg.output_dir / "fit.json";
  write_json(fit, fit_path.string());
  res.files.push_back(fit_path);

  const double gamma = params.number_or("gamma", norm.kind() == NormKind::L1 ? 1.0 : 2.0);
  SamplingPlan plan = sampling_plan(params);
  plan.center = ref.state;
  const double mu = params.has("mu") ? params.number("mu") : estimate_mu(s.T, gamma, norm, plan);

  bool all_pass = true;
  Json checks;
  checks["gamma"] = gamma;
  checks["mu"] = mu;
  checks["reference_exact"] = ref.exact;
  const SummabilityReport sum = check_residual_summability(trace, gamma, mu, ref.state);
  checks["summability"] = summability_json(sum);
  all_pass = all_pass && sum.pass;
  try {
    const LittleOReport lo = little_o_proxy(trace.residuals, 1.0 / gamma);
    checks["little_o"] = little_o_json(lo);
    all_pass = all_pass && lo.pass;
  } catch (const Error& e) {
    checks["little_o"] = {{"skipped", e.what()}};
  }
  if (trace.stop_reason == StopReason::ResidualTol) {
    SamplingPlan plan1 = plan;
    const double mu1 = params.has("sandwich_mu") ? params.number("sandwich_mu")
                                                 : estimate_mu(s.T, 1.0, norm, plan1);
    const SandwichReport sw = check_sandwich(trace, ref.state, mu1);
    Json j = sandwich_json(sw);
    j["mu"] = mu1;
    checks["sandwich"] = j;
    all_pass = all_pass && sw.pass;
  } else {
    checks["sandwich"] = {{"skipped", "trace did not reach the residual tolerance"}};
  }
  const fs::path checks_path = cfg.output_dir / "checks.json";
  write_json(checks, checks_path.string());
  res.files.push_back(checks_path);
  res.exit_code = all_pass ? 0 : 2;
  res.message = all_pass ? "all rate checks passed" : "a rate check failed";
  return res;
}

Eigen::Vector2d point2(const Fields& params, const std::string& key) {
  const Vector v = params.vector(key);
  if (v.size() != 2) throw UsageError(params.name(key), "expected 2 numbers");
  return v;
}

RunResult run_region(const RunConfig& cfg, const Fields& params) {
  const Eigen::Vector2d x = point2(params, "x");
  const Eigen::Vector2d xhat = point2(params, "xhat");
  const double gamma = params.positive("gamma");
  const double mu = params.positive("mu");
  const auto resolution = params.count_or("resolution", kDefaultResolution);
  RegionGrid grid;
  try {
    grid = range_region(x, xhat, gamma, mu, resolution);
  } catch (const DomainError& e) {
    throw UsageError("params", e.what());
  }
  RunResult res;
  const fs::path csv = cfg.output_dir / "region.csv";
  write_region_csv(grid, csv.string());
  res.files.push_back(csv);
  std::size_t inside = 0;
  for (unsigned char c : grid.cells) inside += c;
  res.message = std::to_string(inside) + " of " + std::to_string(grid.cells.size()) +
                " cells inside the region";
  return res;
}

Json resolve_component(const Json& value, const std::string& field, const fs::path& base,
                       fs::path& component_base) {
  component_base = base;
  if (value.is_object()) return value;
  if (!value.is_string()) throw UsageError(field, "expected an object or a file path");
  const fs::path p = base / value.get<std::string>();
  std::ifstream in(p);
  if (!in) throw UsageError(field, "cannot open '" + p.string() + "'");
  try {
    Json j = Json::parse(in);
    if (!j.is_object()) throw UsageError(field, "file does not hold a JSON object");
    component_base = p.parent_path();
    return j;
  } catch (const Json::exception& e) {
    throw UsageError(field, std::string("invalid JSON: ") + e.what());
  }
}

std::string timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  localtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%d-%H%M%S");
  return os.str();
}

}  // namespace

RunConfig parse_run_config(Command command, const Json& doc, const fs::path& base_dir,
                           const Overrides& overrides) {
  if (!doc.is_object()) throw UsageError("config", "expected a JSON object");
  RunConfig cfg;
  cfg.command = command;
  cfg.base_dir = base_dir;
  if (doc.contains("command") && !doc.at("command").is_null()) {
    if (!doc.at("command").is_string()) throw UsageError("command", "expected a string");
    if (command_from_string(doc.at("command").get<std::string>()) != command) {
      throw UsageError("command", "config is for '" + doc.at("command").get<std::string>() +
                                      "', not '" + to_string(command) + "'");
    }
  }
  const bool has_problem = doc.contains("problem") && !doc.at("problem").is_null();
  const bool has_op = doc.contains("operator") && !doc.at("operator").is_null();
  if (has_problem && has_op) {
    throw UsageError("operator", "give either problem or operator, not both");
  }
  fs::path component_base = base_dir;
  if (has_problem) {
    cfg.problem = resolve_component(doc.at("problem"), "problem", base_dir, component_base);
  }
  if (has_op) {
    cfg.op = resolve_component(doc.at("operator"), "operator", base_dir, component_base);
  }
  cfg.base_dir = component_base;
  switch (command) {
    case Command::Certify:
    case Command::Solve:
      if (!has_problem && !has_op) {
        throw UsageError("problem", "either problem or operator is required");
      }
      break;
    case Command::Rates:
      if (!has_problem) throw UsageError("problem", "required for rates");
      break;
    case Command::Region:
      break;
  }
  if (doc.contains("params")) {
    if (!doc.at("params").is_object()) throw UsageError("params", "expected an object");
    cfg.params = doc.at("params");
  }
  if (overrides.seed) cfg.params["seed"] = *overrides.seed;
  if (overrides.gamma) cfg.params["gamma"] = *overrides.gamma;
  if (overrides.mu) cfg.params["mu"] = *overrides.mu;
  if (overrides.beta) cfg.params["beta"] = *overrides.beta;
  if (overrides.eta) cfg.params["eta"] = *overrides.eta;
  if (overrides.lambda) cfg.params["lambda"] = *overrides.lambda;
  if (overrides.tol) cfg.params["tol"] = *overrides.tol;
  if (overrides.max_iter) cfg.params["max_iter"] = *overrides.max_iter;

  if (overrides.out) {
    cfg.output_dir = *overrides.out;
  } else if (doc.contains("output_dir") && !doc.at("output_dir").is_null()) {
    if (!doc.at("output_dir").is_string()) throw UsageError("output_dir", "expected a string");
    cfg.output_dir = doc.at("output_dir").get<std::string>();
  } else {
    cfg.output_dir = to_string(command) + "_" + timestamp();
  }
  return cfg;
}

RunConfig load_run_config(Command command, const fs::path& path, const Overrides& overrides) {
  std::ifstream in(path);
  if (!in) throw UsageError("--config", "cannot open '" + path.string() + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::exception& e) {
    throw UsageError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_run_config(command, doc, path.parent_path(), overrides);
}

RunResult execute(const RunConfig& config) {
  RunResult res;
  try {
    std::error_code ec;
    fs::create_directories(config.output_dir, ec);
    if (ec) {
      throw UsageError("output_dir", "cannot create '" + config.output_dir.string() +
                                         "': " + ec.message());
    }
    const Fields params(config.params, "params", config.base_dir);
    switch (config.command) {
      case Command::Certify:
        return run_certify(config, params);
      case Command::Solve:
        return run_solve(config, params);
      case Command::Rates:
        return run_rates(config, params);
      case Command::Region:
        return run_region(config, params);
    }
    throw UsageError("command", "unknown command");
  } catch (const UsageError& e) {
    res.exit_code = 1;
    res.message = e.what();
  } catch (const NonFiniteIterate& e) {
    res.exit_code = 2;
    res.message = e.what();
  } catch (const NonConvergence& e) {
    res.exit_code = 2;
    res.message = e.what();
  } catch (const std::exception& e) {
    res.exit_code = 1;
    res.message = e.what();
  }
  return res;
}

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sampled operator-class certificates and fixed-point iteration diagnostics"};
  app.require_subcommand(1);
  std::string config_path;
  Overrides ov;
  const std::pair<const char*, const char*> commands[] = {
      {"certify", "Check an operator-class inequality on sampled pairs"},
      {"solve", "Run Picard iteration and write the residual trace"},
      {"rates", "Fit convergence rates and run the trace checks"},
      {"region", "Rasterize the admissible region of T x in the plane"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "Run-config JSON file")->required();
    sub->add_option("--out", ov.out, "Output directory");
    sub->add_option("--seed", ov.seed, "Sampling seed");
    sub->add_option("--gamma", ov.gamma);
    sub->add_option("--mu", ov.mu);
    sub->add_option("--beta", ov.beta);
    sub->add_option("--eta", ov.eta);
    sub->add_option("--lambda", ov.lambda);
    sub->add_option("--tol", ov.tol);
    sub->add_option("--max-iter", ov.max_iter);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  const Command command = command_from_string(app.get_subcommands().front()->get_name());
  RunResult res;
  try {
    res = execute(load_run_config(command, config_path, ov));
  } catch (const UsageError& e) {
    res.exit_code = 1;
    res.message = e.what();
  }
  (res.exit_code == 1 ? err : out) << res.message << '\n';
  for (const auto& f : res.files) out << "wrote " << f.string() << '\n';
  return res.exit_code;
}

}  // namespace ganfp

#include "ganfp/report.hpp"

#include "ganfp/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace ganfp {

namespace {

std::ofstream open_for_write(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw Error("failed writing '" + path + "'");
}

// JSON has no inf/nan; they are spelled as strings.
Json number(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

double number_from(const Json& j) {
  if (j.is_number()) return j.get<double>();
  const auto s = j.get<std::string>();
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  throw Error("not a number: " + s);
}

Json optional_number(const std::optional<double>& v) {
  return v ? number(*v) : Json(nullptr);
}

std::optional<double> optional_from(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return number_from(j.at(key));
}

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json to_json(const Vector& v) {
  Json arr = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(number(v(i)));
  return arr;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error("expected a JSON array of numbers");
  Vector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = number_from(j[i]);
  }
  return v;
}

Json certificate_json(const GanCertificate& cert) {
  Json j;
  j["property"] = to_string(cert.property);
  j["verdict"] = to_string(cert.verdict);
  j["gamma"] = optional_number(cert.gamma);
  j["mu"] = optional_number(cert.mu);
  j["rho"] = optional_number(cert.rho);
  j["norm"] = cert.norm.name();
  if (cert.norm.kind() == NormKind::Weighted) {
    const Matrix& W = cert.norm.metric()->weight();
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < W.rows(); ++r) rows.push_back(to_json(W.row(r).transpose()));
    j["norm_weight"] = rows;
  }
  j["min_slack"] = number(cert.min_slack);
  j["tol"] = cert.tol;
  j["n_checked"] = cert.n_checked;
  j["operator"] = cert.operator_label;
  j["witness"] = {{"x", to_json(cert.witness.first)},
                  {"y", to_json(cert.witness.second)}};
  j["notes"] = cert.notes;
  return j;
}

GanCertificate certificate_from_json(const Json& j) {
  GanCertificate c;
  c.property = property_from_string(j.at("property").get<std::string>());
  const auto verdict = j.at("verdict").get<std::string>();
  if (verdict != "PASS" && verdict != "FAIL") throw Error("bad verdict: " + verdict);
  c.verdict = verdict == "PASS" ? Verdict::Pass : Verdict::Fail;
  c.gamma = optional_from(j, "gamma");
  c.mu = optional_from(j, "mu");
  c.rho = optional_from(j, "rho");
  const auto norm_name = j.at("norm").get<std::string>();
  if (norm_name == "l2") {
    c.norm = NormSpec::l2();
  } else if (norm_name == "l1") {
    c.norm = NormSpec::l1();
  } else if (norm_name == "weighted") {
    const Json& rows = j.at("norm_weight");
    Matrix W(static_cast<Eigen::Index>(rows.size()),
             static_cast<Eigen::Index>(rows.size()));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      W.row(static_cast<Eigen::Index>(r)) = vector_from_json(rows[r]).transpose();
    }
    c.norm = NormSpec::weighted(W);
  } else {
    throw Error("unknown norm: " + norm_name);
  }
  c.min_slack = number_from(j.at("min_slack"));
  c.tol = j.at("tol").get<double>();
  c.n_checked = j.at("n_checked").get<std::size_t>();
  c.operator_label = j.at("operator").get<std::string>();
  c.witness = {vector_from_json(j.at("witness").at("x")),
               vector_from_json(j.at("witness").at("y"))};
  c.notes = j.at("notes").get<std::vector<std::string>>();
  return c;
}

Json fit_json(const RateFit& fit) {
  Json j;
  j["model"] = to_string(fit.model);
  if (fit.model == RateModel::Polynomial) {
    j["exponent_p"] = number(fit.exponent_p);
  } else {
    j["rho"] = number(fit.rho);
  }
  j["log_constant"] = number(fit.log_constant);
  j["r_squared"] = number(fit.r_squared);
  j["tail_start"] = fit.tail_start;
  j["n_points"] = fit.n_points;
  return j;
}

Json summability_json(const SummabilityReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["bound"] = number(r.bound);
  j["final_sum"] = r.partial_sums.empty() ? Json(0.0) : number(r.partial_sums.back());
  j["max_excess"] = number(r.max_excess);
  j["tol"] = r.tol;
  return j;
}

Json sandwich_json(const SandwichReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["lower_pass"] = r.lower_pass;
  j["upper_pass"] = r.upper_pass;
  j["upper_conclusive"] = r.upper_conclusive;
  j["lower_worst"] = number(r.lower_worst);
  j["lower_worst_k"] = r.lower_worst_k;
  j["upper_worst"] = number(r.upper_worst);
  j["upper_worst_k"] = r.upper_worst_k;
  j["tail_mode"] = to_string(r.tail_mode);
  j["remainder"] = number(r.remainder);
  j["tol"] = r.tol;
  return j;
}

Json little_o_json(const LittleOReport& r) {
  Json j;
  j["pass"] = r.pass;
  j["exponent"] = number(r.exponent);
  j["slope"] = number(r.slope);
  j["first"] = number(r.first);
  j["last"] = number(r.last);
  j["window_start"] = r.window_start;
  j["n_points"] = r.n_points;
  return j;
}

void write_json(const Json& j, const std::string& path) {
  auto out = open_for_write(path);
  out << j.dump(2) << '\n';
  finish(out, path);
}

void write_trace_csv(const IterationTrace& trace, const std::string& path,
                     const std::vector<std::string>& extra_header) {
  auto out = open_for_write(path);
  out << "# operator: " << trace.label << '\n'
      << "# norm: " << trace.norm.name() << '\n'
      << "# stop_reason: " << to_string(trace.stop_reason) << '\n'
      << "# k_final: " << trace.k_final << '\n'
      << "# res_tol: " << format_double(trace.res_tol) << '\n';
  for (const auto& line : extra_header) out << "# " << line << '\n';
  out << "k,residual,error_to_ref\n";
  const auto& errs = trace.errors_to_ref;
  for (std::size_t k = 0; k <= trace.k_final; ++k) {
    out << k << ',';
    if (k < trace.residuals.size()) out << format_double(trace.residuals[k]);
    out << ',';
    if (errs && k < errs->size()) out << format_double((*errs)[k]);
    out << '\n';
  }
  finish(out, path);
}

void write_region_csv(const RegionGrid& grid, const std::string& path) {
  auto out = open_for_write(path);
  out << "# x: " << format_double(grid.x(0)) << ' ' << format_double(grid.x(1)) << '\n'
      << "# xhat: " << format_double(grid.xhat(0)) << ' '
      << format_double(grid.xhat(1)) << '\n'
      << "# gamma: " << format_double(grid.gamma) << '\n'
      << "# mu: " << format_double(grid.mu) << '\n'
      << "# bounds: " << format_double(grid.x_min) << ' ' << format_double(grid.x_max)
      << ' ' << format_double(grid.y_min) << ' ' << format_double(grid.y_max) << '\n'
      << "# resolution: " << grid.nx << ' ' << grid.ny << '\n';
  for (std::size_t r = 0; r < grid.ny; ++r) {
    for (std::size_t c = 0; c < grid.nx; ++c) {
      if (c) out << ',';
      out << (grid.at(r, c) ? '1' : '0');
    }
    out << '\n';
  }
  finish(out, path);
}

}  // namespace ganfp

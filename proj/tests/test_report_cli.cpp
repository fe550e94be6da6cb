#include "ganfp/cli.hpp"
#include "ganfp/report.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <sstream>
#include <unistd.h>

using namespace ganfp;
namespace fs = std::filesystem;

namespace {

const fs::path kData = GANFP_TEST_DATA_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() /
                     ("ganfp_test_" + std::to_string(::getpid()) + "_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "ganfp");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> csv_data_rows(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  return rows;
}

}  // namespace

TEST(Report, UnwritablePathThrows) {
  EXPECT_THROW(write_json(Json::object(), "/nonexistent_dir_ganfp/x.json"), Error);
  IterationTrace t;
  EXPECT_THROW(write_trace_csv(t, "/nonexistent_dir_ganfp/t.csv"), Error);
}

TEST(Report, FormatDoubleRoundTrips) {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 123456789.123456789}) {
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Report, CertificateJsonRoundTrip) {
  const Operator T = prox_op(prox_l1(1.0), 1.0, 2, "st").with_hint(Vector::Zero(2));
  SamplingPlan p;
  p.radius_scales = {1.0, 1e4};
  const auto cert = certify(T, Property::GAN, {0.5, 0.1, std::nullopt}, NormSpec::l2(), p);
  ASSERT_FALSE(cert.passed());
  const auto back = certificate_from_json(Json::parse(certificate_json(cert).dump()));
  EXPECT_EQ(back.witness.first, cert.witness.first);
  EXPECT_EQ(back.witness.second, cert.witness.second);
  EXPECT_EQ(back.min_slack, cert.min_slack);
  EXPECT_EQ(back.verdict, Verdict::Fail);
  EXPECT_EQ(*back.gamma, 0.5);
}

TEST(Report, WeightedCertificateRoundTrip) {
  Matrix B(1, 2);
  B << 0.3, -0.2;
  GanCertificate c;
  c.norm = NormSpec::weighted(build_W(0.5, 0.5, B));
  c.witness = {Vector::Ones(3), Vector::Zero(3)};
  const auto back = certificate_from_json(certificate_json(c));
  EXPECT_EQ(back.norm.kind(), NormKind::Weighted);
  EXPECT_EQ(back.norm.metric()->weight(), c.norm.metric()->weight());
}

TEST(Report, TraceWithoutReferenceHasBlankErrors) {
  const fs::path dir = scratch("trace");
  const auto t = picard(affine_op(0.5, Vector::Zero(1)), Vector::Ones(1), 3, 0.0);
  write_trace_csv(t, (dir / "t.csv").string());
  const auto rows = csv_data_rows(dir / "t.csv");
  ASSERT_EQ(rows.size(), 5u);
  EXPECT_EQ(rows[0], "k,residual,error_to_ref");
  EXPECT_EQ(rows[1], "0,0.5,");
  EXPECT_EQ(rows[4], "3,,");
}

TEST(Cli, CertifySoftThresholdPasses) {
  const fs::path out = scratch("certify_pass");
  const auto r = run({"certify", "--config", (kData / "configs/soft_threshold_gan.json").string(),
                      "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err << r.out;
  const Json j = read_json(out / "certificate.json");
  EXPECT_EQ(j.at("verdict"), "PASS");
  EXPECT_EQ(j.at("n_checked"), 10000);
  EXPECT_GE(j.at("min_slack").get<double>(), -1e-10);
}

TEST(Cli, CertifyFailureWitnessReevaluates) {
  const fs::path out = scratch("certify_fail");
  const auto r =
      run({"certify", "--config", (kData / "configs/soft_threshold_small_exponent.json").string(),
           "--out", out.string()});
  EXPECT_EQ(r.code, 2) << r.err;
  std::ifstream in(out / "certificate.json");
  const auto cert = certificate_from_json(Json::parse(in));
  ASSERT_EQ(cert.verdict, Verdict::Fail);
  const Operator T = prox_op(prox_l1(1.0), 1.0, 1, "st");
  const double again =
      gan_slack(T, cert.witness.first, cert.witness.second, 0.5, 0.1, NormSpec::l2());
  EXPECT_NEAR(again, cert.min_slack, 1e-12);
}

TEST(Cli, OverridesReplaceParams) {
  const fs::path out = scratch("override");
  const auto r = run({"certify", "--config", (kData / "configs/soft_threshold_gan.json").string(),
                      "--out", out.string(), "--gamma", "0.5", "--mu", "0.1"});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(read_json(out / "certificate.json").at("gamma"), 0.5);
}

TEST(Cli, SolveIdentityTraceLengthOne) {
  const fs::path out = scratch("solve_identity");
  const auto r = run({"solve", "--config", (kData / "configs/identity_solve.json").string(),
                      "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = csv_data_rows(out / "trace.csv");
  ASSERT_EQ(rows.size(), 3u);  // header, k = 0, k = 1
  EXPECT_EQ(rows[1], "0,0,");
  const Json s = read_json(out / "summary.json");
  EXPECT_EQ(s.at("k_final"), 1);
  EXPECT_EQ(s.at("stop_reason"), "ResidualTol");
}

TEST(Cli, SolveDivergenceExitsTwo) {
  const fs::path dir = scratch("solve_diverge");
  std::ofstream(dir / "cfg.json")
      << R"({"problem": {"kind": "least_squares", "A": [[1]], "b": [0]},
             "params": {"beta": 3.0, "x0": [1.0]}})";
  const auto r = run({"solve", "--config", (dir / "cfg.json").string(), "--out",
                      (dir / "out").string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_EQ(read_json(dir / "out/summary.json").at("stop_reason"), "Diverged");
}

TEST(Cli, RatesLeastSquaresMatchesEigenOracle) {
  const fs::path dir = scratch("rates_ls");
  const Matrix A = oracle::gaussian(30, 10, 77);
  const Vector b = oracle::gaussian_vector(30, 78);
  {
    std::ofstream fa(dir / "A.txt"), fb(dir / "b.txt");
    write_matrix(fa, A);
    write_matrix(fb, b);
  }
  std::ofstream(dir / "cfg.json")
      << R"({"problem": {"kind": "least_squares", "A": "A.txt", "b": "b.txt"},
             "params": {"model": "exponential", "tol": 1e-10, "max_iter": 100000}})";
  const auto r = run({"rates", "--config", (dir / "cfg.json").string(), "--out",
                      (dir / "out").string()});
  EXPECT_EQ(r.code, 0) << r.err << r.out;
  const Json fit = read_json(dir / "out/fit.json");
  ASSERT_EQ(fit.at("model"), "Exponential");
  const double L = oracle::sym_eigenvalues(A.transpose() * A).maxCoeff();
  const double truth = oracle::gd_ratio(A, 1.0 / L);
  EXPECT_NEAR(fit.at("rho").get<double>(), truth, 0.02 * truth);
  const Json checks = read_json(dir / "out/checks.json");
  EXPECT_TRUE(checks.at("summability").at("pass").get<bool>());
  EXPECT_TRUE(checks.at("sandwich").at("lower_pass").get<bool>());
}

TEST(Cli, RegionGridWritten) {
  const fs::path out = scratch("region");
  const auto r = run({"region", "--config", (kData / "configs/region_disk.json").string(),
                      "--out", out.string()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = csv_data_rows(out / "region.csv");
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows[0].size(), 2u * 201u - 1u);
  const std::string text = slurp(out / "region.csv");
  EXPECT_NE(text.find("# gamma: 2"), std::string::npos);
  EXPECT_NE(text.find("# resolution: 201 201"), std::string::npos);
}

TEST(Cli, ReproducibleByteForByte) {
  for (const char* cfg : {"configs/soft_threshold_small_exponent.json",
                          "configs/lasso_rates.json", "configs/analysis_l1_certify.json",
                          "configs/region_disk.json"}) {
    const std::string cmd = std::string(cfg).find("lasso") != std::string::npos ? "rates"
                            : std::string(cfg).find("region") != std::string::npos ? "region"
                                                                                   : "certify";
    const fs::path a = scratch("repro_a"), b = scratch("repro_b");
    const auto ra = run({cmd, "--config", (kData / cfg).string(), "--out", a.string()});
    const auto rb = run({cmd, "--config", (kData / cfg).string(), "--out", b.string()});
    ASSERT_NE(ra.code, 1) << cfg << ": " << ra.err;
    EXPECT_EQ(ra.code, rb.code);
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(a)) {
      ++files;
      EXPECT_EQ(slurp(e.path()), slurp(b / e.path().filename())) << e.path();
    }
    EXPECT_GT(files, 0u) << cfg;
  }
}

TEST(Cli, DefaultOutputDirectoryNamedByCommand) {
  const fs::path dir = scratch("default_out");
  const fs::path cwd = fs::current_path();
  fs::current_path(dir);
  const auto r = run({"region", "--config", (kData / "configs/region_disk.json").string()});
  fs::current_path(cwd);
  EXPECT_EQ(r.code, 0);
  std::size_t matches = 0;
  for (const auto& e : fs::directory_iterator(dir)) {
    matches += e.path().filename().string().rfind("region_", 0) == 0;
  }
  EXPECT_EQ(matches, 1u);
}

TEST(Cli, MalformedConfigCorpus) {
  const fs::path dir = kData / "malformed";
  std::ifstream in(dir / "expected.json");
  const Json cases = Json::parse(in);
  ASSERT_GE(cases.size(), 20u);
  const fs::path out = scratch("malformed");
  for (const auto& c : cases) {
    const std::string file = c.at("file");
    const auto r = run({c.at("command").get<std::string>(), "--config", (dir / file).string(),
                        "--out", (out / file).string()});
    EXPECT_EQ(r.code, 1) << file << ": " << r.out;
    const std::string field = c.at("field");
    EXPECT_EQ(r.err.rfind(field + ":", 0), 0u) << file << " -> " << r.err;
  }
}

TEST(Cli, UsageErrorsFromArguments) {
  EXPECT_EQ(run({}).code, 1);
  EXPECT_EQ(run({"fly"}).code, 1);
  EXPECT_EQ(run({"solve"}).code, 1);  // --config is required
  EXPECT_EQ(run({"solve", "--config", "x.json", "--seed", "abc"}).code, 1);
  EXPECT_EQ(run({"--help"}).code, 0);
}

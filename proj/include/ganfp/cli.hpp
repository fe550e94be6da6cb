#pragma once

#include "ganfp/error.hpp"
#include "ganfp/report.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ganfp {

enum class Command { Certify, Solve, Rates, Region };

std::string to_string(Command c);
Command command_from_string(const std::string& s);

/// A configuration problem attributable to one field, e.g. "params.mu".
class UsageError : public Error {
 public:
  UsageError(std::string field, const std::string& message)
      : Error(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

/// `problem` and `op` hold the resolved JSON objects; file paths inside them
/// are interpreted relative to base_dir.
struct RunConfig {
  Command command = Command::Solve;
  std::optional<Json> problem;
  std::optional<Json> op;
  Json params = Json::object();
  std::filesystem::path output_dir;
  std::filesystem::path base_dir = ".";
};

/// Scalar overrides given on the command line; they replace params entries.
struct Overrides {
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<double> gamma, mu, beta, eta, lambda, tol;
  std::optional<std::size_t> max_iter;
};

/// Parses a run-config document. `problem`/`operator` may be inline objects
/// or paths to JSON files. Throws UsageError naming the offending field.
RunConfig parse_run_config(Command command, const Json& doc,
                           const std::filesystem::path& base_dir,
                           const Overrides& overrides = {});

RunConfig load_run_config(Command command, const std::filesystem::path& path,
                          const Overrides& overrides = {});

struct RunResult {
  int exit_code = 0;  // 0 PASS/converged, 2 FAIL/diverged, 1 usage error
  std::vector<std::filesystem::path> files;
  std::string message;
};

/// Runs one workflow and writes its reports into config.output_dir (created
/// if missing). Never throws for configuration or numerical failures; those
/// map to exit codes with `message` naming the cause.
RunResult execute(const RunConfig& config);

/// Entry point of the `ganfp` executable.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ganfp

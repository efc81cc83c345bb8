#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "exode/exactness.hpp"
#include "exode/zero_test.hpp"

namespace exode::cli {

enum ExitCode : int {
  kSuccess = 0,
  kNegative = 1,
  kUndetermined = 2,
  kError = 3,
};

/// Everything a command needs; filled from a problem file, then flags.
struct Problem {
  std::string a2;
  std::string a1 = "0";
  std::string a0 = "0";
  Bindings params;
  std::optional<Point3> ivp;
  std::optional<Point3> base;
  std::optional<Box> box;
  double tol = 1e-9;
  double drift_tol = 1e-6;
  std::uint64_t seed = 42;
  int samples = 64;
  int steps = 1024;
  std::optional<double> x_end;
  std::optional<std::string> mu;
  std::optional<std::string> alpha;
  std::optional<std::string> beta;
  std::optional<std::string> gamma;
  int range = 4;
  bool all = false;
};

/// Throws std::invalid_argument on malformed documents.
Problem problem_from_json(const nlohmann::json& doc);

struct CommandResult {
  int exit_code = kSuccess;
  nlohmann::json report;
  /// Extra payload printed verbatim in text mode (trajectory CSV).
  std::string csv;
};

CommandResult cmd_check(const Problem& pb);
CommandResult cmd_reduce(const Problem& pb);
CommandResult cmd_mu(const Problem& pb);
CommandResult cmd_verify_mu(const Problem& pb);
CommandResult cmd_simulate(const Problem& pb);

/// Human-readable rendering of a report.
std::string render_text(const nlohmann::json& report);

/// Full command-line entry point.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace exode::cli

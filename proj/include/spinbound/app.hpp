#pragma once

#include <map>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "spinbound/config.hpp"

namespace spinbound {

inline constexpr const char* kReportSchema = "spinbound-report/1";

enum class Command { Certify, Oracle, ScanDecay, Fourier, Report };

std::optional<Command> parse_command(const std::string& name);
std::string to_string(Command c);

/// Exit codes of the command-line contract.
enum ExitCode : int { kExitSuccess = 0, kExitNotCertified = 1, kExitConfig = 2, kExitNumerical = 3 };

struct RunOutcome {
  nlohmann::json report;
  /// CSV tables by name: "eigenvalues", "profile", "fourier".
  std::map<std::string, std::string> tables;
  int exit_code = kExitSuccess;
};

/// Runs one command. Configuration problems throw ConfigError; numerical failures propagate
/// as other spinbound errors.
RunOutcome run(Command command, const RunConfig& config);

/// Shortest round-trip decimal.
std::string format_csv_number(double v);

}  // namespace spinbound

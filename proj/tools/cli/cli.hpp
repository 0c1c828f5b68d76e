#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace cscb::cli {

inline constexpr std::string_view kSchemaVersion = "csc-bundles/1";

enum class Command { Verify, Families, Count, Thresholds };
enum class Format { Json, Csv };

/// Exit codes of every command.
enum ExitCode : int { kPass = 0, kToleranceFailure = 1, kInvalidInput = 2 };

std::string_view to_string(Command c);
std::string_view to_string(Format f);

/// Fully resolved inputs of one run.
struct RunConfig {
  Command command = Command::Verify;
  std::map<std::string, double> params;
  std::string factor = "fiber";  // count: which sphere carries the conformal factor
  std::string output_path;
  std::string series_path;       // verify: optional (t, scal) series CSV
  Format format = Format::Json;
  std::uint64_t seed = 0;
  std::map<std::string, double> tolerances;
};

/// Default tolerance table; RunConfig::tolerances overrides entries by name.
std::map<std::string, double> default_tolerances();

/// Raised for inputs that violate a documented precondition (exit 2).
class InvalidInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct OutputFile {
  std::string path;
  std::string contents;
};

struct CommandResult {
  int exit_code = kPass;
  nlohmann::json report;
  /// Primary output (JSON or CSV text) for --out / stdout.
  std::string primary;
  /// Additional files (family tables, series).
  std::vector<OutputFile> extra_files;
};

/// Runs one command without touching the filesystem. Throws InvalidInput.
CommandResult run(const RunConfig& cfg);

/// Rebuilds the configuration recorded in a report.
RunConfig config_from_report(const nlohmann::json& report);

/// Flat key=value reader; '#' starts a comment. Throws InvalidInput.
std::map<std::string, std::string> read_key_values(std::istream& in);

/// JSON text of a report, with a trailing newline.
std::string dump_report(const nlohmann::json& report);

/// Locale-independent 17-significant-digit rendering used in CSV output.
std::string format_double(double v);

/// Command-line entry point: parses argv, runs, writes outputs.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace cscb::cli

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <json.hpp>

namespace geoaccel {

enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 1,
  kExitSolver = 2,
  kExitEquivalence = 3,
  kExitCertificate = 4,
};

enum class OutputFormat { Csv, Json };

struct CommandOptions {
  std::string out;  // file path, or stem for multi-file outputs; empty = stdout
  OutputFormat format = OutputFormat::Csv;
  std::optional<std::uint64_t> seed;  // overrides the config's "seed"
};

// Each command takes the parsed config, writes its outputs, prints a summary
// to `log` and returns an exit code. Errors propagate as exceptions; use
// run_command for the exit-code mapping.
int cmd_run(const nlohmann::json& config, const CommandOptions& options, std::ostream& out,
            std::ostream& log);
int cmd_equivalence(const nlohmann::json& config, const CommandOptions& options, std::ostream& out,
                    std::ostream& log);
int cmd_certify(const nlohmann::json& config, const CommandOptions& options, std::ostream& out,
                std::ostream& log);
int cmd_geodesic(const nlohmann::json& config, const CommandOptions& options, std::ostream& out,
                 std::ostream& log);

// Dispatches `command` and maps exceptions to exit codes: configuration
// errors to 1, solver, domain and divergence failures to 2.
int run_command(const std::string& command, const nlohmann::json& config,
                const CommandOptions& options, std::ostream& out, std::ostream& log);

// Reads a JSON config file; an empty path yields an empty object.
nlohmann::json load_config(const std::string& path);

}  // namespace geoaccel

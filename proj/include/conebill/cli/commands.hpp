#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "conebill/cli/run_config.hpp"

namespace conebill::cli {

enum ExitCode : int { kExitPass = 0, kExitFail = 1, kExitUsage = 2 };

struct CommandResult {
  int exit_code = kExitPass;
  Json report;                                            // versioned run report
  std::string csv;                                        // tabular output, if the command has one
  std::string summary;                                    // human-readable lines
  std::vector<std::pair<std::string, std::string>> files; // extra artifacts (path, content)
};

CommandResult cmd_elliptic_simulate(const RunConfig& cfg);
CommandResult cmd_elliptic_bound(const RunConfig& cfg);
CommandResult cmd_spiral_verify(const RunConfig& cfg);
CommandResult cmd_spiral_vertices(const RunConfig& cfg);
CommandResult cmd_curve_build(const RunConfig& cfg);
CommandResult cmd_curve_export(const RunConfig& cfg);
CommandResult cmd_replay(const RunConfig& cfg);
CommandResult cmd_ndim_check(const RunConfig& cfg);

/// Dispatches on cfg.command; throws UsageError for an unknown command.
CommandResult run_command(const RunConfig& cfg);

/// Parses argv, runs the command and writes every output at the end.
/// Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace conebill::cli

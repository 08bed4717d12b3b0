#pragma once

#include "cli/config.hpp"
#include "cli/report.hpp"

namespace wlab::cli {

// Runs the configured experiment; Report::pass folds every enabled acceptance comparison.
Report run_command(const RunConfig& c);

// Full command line: parse, run, write outputs. Returns 0 (pass), 1 (acceptance failure) or 2 (usage error).
int cli_main(int argc, const char* const* argv);

}  // namespace wlab::cli

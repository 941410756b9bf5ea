#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ontolink {

// Exit codes: 0 success, 1 usage error, 2 data error.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

// Subcommands: convert, stats, embed, benchmark, recommend, temporal,
// explain, serve. Results go to `out` (or --out), diagnostics to `err`.
int run_cli(int argc, char** argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ontolink

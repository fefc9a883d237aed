#pragma once

#include <iosfwd>

namespace ontoalign {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitUsage = 2 };

/// Entry point of the `ontoalign` tool. Results go to `out`; the resolved
/// configuration, warnings and errors go to `err`.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace ontoalign

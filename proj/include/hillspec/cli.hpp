// Command line front end. Subcommands map one-to-one onto the library
// stages: discriminant and bands expose the Floquet analysis of a periodic
// background, embed/verify/evans/perturb expose the embedded-eigenvalue
// pipeline. All file output goes through a --out prefix so runs are easy to
// keep apart.
//
// Exit codes: 0 success, 1 domain error (bad input, no gap, threshold
// violation in strict mode), 2 accuracy failure (integrator or verification
// tolerances not met), 64 usage error.
#pragma once

#include <string>
#include <vector>

namespace hillspec::cli {

// Runs one command given the argument list without the program name.
// Returns the process exit code; never throws.
int run(std::vector<std::string> args);

// main() adapter.
int run_main(int argc, char** argv);

}  // namespace hillspec::cli

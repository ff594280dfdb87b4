#pragma once

namespace hdg {

/// Command-line entry point. Exit codes: 0 success/converged, 1 usage
/// error, 2 non-convergence, 3 numerical failure.
int run_cli(int argc, const char* const* argv);

} // namespace hdg

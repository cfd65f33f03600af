#pragma once

namespace spca {

/// Entry point of the `spca` tool; returns the process exit code
/// (0 ok, 1 parameter, 2 numerical/construction, 3 I/O).
int run_cli(int argc, char** argv);

}  // namespace spca

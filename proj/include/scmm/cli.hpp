#pragma once

#include <iosfwd>
#include <string>

namespace scmm {

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr const char* kOutputDirEnv = "SCMM_OUTPUT_DIR";

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitValidation = 2, kExitNumerical = 3 };

// Runs one subcommand (validate, equilibrium, classify, kernel, converge, sample).
// Output directory: --out, else $SCMM_OUTPUT_DIR, else ./scmm-out.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scmm

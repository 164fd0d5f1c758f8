#pragma once
// Command-line entry point. Subcommands: gen-data, build-regime, train, eval,
// ablate, sweep-ratio, selftest.
//
// Exit status: 0 success, 2 usage, 3 configuration or validation, 4 numeric
// failure, 5 I/O or parse failure, 1 anything else (including a replay whose
// metrics differ from its manifest).

#include <iosfwd>

#include "pemscl/error.hpp"

namespace pemscl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitOther = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumeric = 4;
inline constexpr int kExitIo = 5;

int exit_code_for(ErrorKind kind);

/// Name of the environment variable holding the default output directory.
inline constexpr const char* kOutDirEnv = "PEMSCL_OUT_DIR";

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pemscl

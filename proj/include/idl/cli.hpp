#pragma once

#include <iosfwd>

namespace idl {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;

/// Entry point of the `idl` command-line tool. JSON results go to `out`
/// (or to --out files), diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace idl

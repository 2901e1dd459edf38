#pragma once

#include <iosfwd>

namespace plab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;     // runtime / I/O failure
inline constexpr int kExitValidation = 2;  // bad flags, config or arguments
inline constexpr int kExitCheck = 3;       // --check given and a check failed

/// Entry point of the polymer-lab tool. JSON goes to `out`, diagnostics to `err`.
int parse_and_dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace plab::cli

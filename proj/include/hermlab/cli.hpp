#pragma once

namespace hermlab::cli {

/// Entry point for the hermlab executable.  Exit codes: 0 success, 1
/// malformed input (file or zoo reference), 2 model validation failure,
/// 3 verification-suite failure; CLI usage errors use the parser's own codes.
int run(int argc, const char* const* argv);

}  // namespace hermlab::cli

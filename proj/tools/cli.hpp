#pragma once

#include <ostream>

namespace poolea::cli {

/// Entry point of the `poolea` binary.
///
/// Returns 0 on success, 1 when a resolved configuration fails validation or
/// the work itself fails, and 2 for usage errors (unknown subcommand or
/// flag, unparsable value).
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace poolea::cli

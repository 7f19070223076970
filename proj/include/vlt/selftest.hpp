#pragma once

#include <ostream>

namespace vlt {

/// Run the built-in verification suite (geometry identities, transform
/// identities, annihilation bounds, Mellin calibration, file-format round
/// trips), printing one pass/fail line per invariant. Returns the number of
/// failures.
int run_selftest(std::ostream& out);

}  // namespace vlt

#pragma once

#include <iosfwd>

namespace fedx::tools {

// Small invariant suite runnable from an installed binary. Prints one line
// per check and returns true when all pass.
bool run_selftest(std::ostream& out);

}  // namespace fedx::tools

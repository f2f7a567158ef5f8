#pragma once

#include <iosfwd>

namespace pcopt {

/// Entry point of the `pcopt` tool: run, ensemble, compare, schedule, bench.
/// Returns 0 on success; errors go to `err` with a nonzero status.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace pcopt

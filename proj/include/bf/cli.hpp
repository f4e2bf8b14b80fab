#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bf {

/// The `bf` command line. `args` excludes the program name. Returns the
/// process exit status: 0 on success, 1 when `examples run` has a failing
/// check, 2 on invalid input, 3 on I/O failure.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
            std::ostream& err);

}  // namespace bf

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cbpv::cli {

/// Exit codes: 0 success, 1 type error or adequacy violation, 2 parse or
/// usage error.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace cbpv::cli

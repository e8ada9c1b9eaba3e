#pragma once
// Command line front end. Exit codes: 0 success / checks pass, 1 a check
// failed (witness in the report), 2 malformed input or usage error.

#include <iosfwd>
#include <string>
#include <vector>

namespace etale {

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace etale

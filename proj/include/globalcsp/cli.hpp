#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace gcsp {

/// Command-line driver. args excludes the program name. Returns the process
/// exit code: 0 = success / sat / yes, 1 = unsat / not-sparse / no,
/// 2 = errors (including usage errors).
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace gcsp

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rieszlab {

// Entry point shared by the installed binary and in-process tests.
// Returns 0 on success, 1 when a requested certificate/criterion fails,
// 2 on configuration errors.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

std::string version_string();

}  // namespace rieszlab

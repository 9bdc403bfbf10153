#pragma once

// `sigt generate | train | eval | sweep`.
//
// Exit codes: 0 success, 1 usage or invalid configuration, 2 data error
// (missing/corrupt/incompatible files, unwritable outputs), 3 numeric
// failure during training.

#include <ostream>
#include <string>
#include <vector>

namespace sigt::cli {

enum ExitCode : int { kOk = 0, kUsage = 1, kData = 2, kNumeric = 3 };

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sigt::cli

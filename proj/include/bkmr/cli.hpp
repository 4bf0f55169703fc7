#pragma once

#include <string>
#include <vector>

// Command-line front end. `run` executes one command (fit, gls, simulate,
// report) and returns the process exit code: 0 success, 2 input error,
// 3 fit or internal error. Kept callable in-process so tests can drive the
// exact code path the binary uses.

namespace bkmr::cli {

int run(const std::vector<std::string>& args);

} // namespace bkmr::cli

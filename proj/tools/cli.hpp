#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace daec::cli {

// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,       // bad or unknown flags
  kFormat = 2,      // unreadable or malformed input file
  kDomain = 3,      // decode contract or calibration failure
  kConfig = 4,      // experiment plan cannot run
  kUnexpected = 5,
};

// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace daec::cli

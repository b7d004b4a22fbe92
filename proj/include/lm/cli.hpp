#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lm::cli {

enum ExitCode { kOk = 0, kDomainFailure = 1, kUsage = 2 };

/// Runs one lmtool invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lm::cli

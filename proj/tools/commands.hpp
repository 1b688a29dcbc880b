#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace bdiplay::cli {

enum ExitCode { kOk = 0, kDomainFailure = 1, kUsageError = 2 };

// `args` excludes the program name. Everything the commands print goes to
// `out` / `err`, so tests can run them in-process.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace bdiplay::cli

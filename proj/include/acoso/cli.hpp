#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

namespace acoso::cli {

enum ExitCode : int { kOk = 0, kDomainError = 1, kUsageError = 2 };

/// Runs one subcommand. `args` excludes the program name. Data goes to files
/// or `out`, diagnostics to `err`. `data_dir` holds the shipped keyword and
/// stop-word files; empty means the build-time default.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const std::filesystem::path& data_dir = {});

std::filesystem::path default_data_dir();

}  // namespace acoso::cli

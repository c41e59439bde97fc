#pragma once

#include <string>
#include <vector>

namespace acts {

enum ExitCode : int { kExitOk = 0, kExitConfig = 1, kExitRuntime = 2 };

/// Entry point of the `acts` command line tool. args[0] is the program name.
int cli_main(const std::vector<std::string>& args);

/// Writes `content` to `path` through a temporary file and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// CSV rendering of a double: shortest round-trip form, "" for NaN, and
/// "-inf"/"inf" for infinities.
std::string csv_number(double v);

const char* library_version();
const char* git_revision();

}  // namespace acts

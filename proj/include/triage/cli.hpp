#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "triage/pipeline.hpp"

namespace triage::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsage = 1,
    kDataError = 2,
    kModelError = 3,
};

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// id, decision, family-or-dash, confidence-or-dash, triggered=a,b, features=N
std::string verdict_line(const Verdict& v, std::string_view id);

// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::string& path, std::string_view content);

} // namespace triage::cli

#pragma once

#include <ostream>
#include <span>
#include <string>

namespace codesum::cli {

// Runs one command ("segment", "train-extractor", ...). `args` excludes the
// program name. Returns the process exit status: 0 on success, 2 for usage
// errors, 1 for anything else; failures print one "codesum: <stage>: ..."
// line to `err`.
int run_pipeline(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace codesum::cli

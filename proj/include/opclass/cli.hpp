#pragma once

namespace opclass::cli {

// Runs one opclass command. Exit codes: 0 success, 2 parse/config/data
// errors, 3 schema mismatch (e.g. a full-feature model given bytecode only).
int run(int argc, const char* const* argv);

}  // namespace opclass::cli

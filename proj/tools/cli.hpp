#pragma once

#include <ostream>

namespace permqfi::cli {

/// Entry point of the permqfi tool. Data summaries go to `out`, progress and
/// errors to `err`. Returns 0 on success, 1 on usage errors and 2 on
/// numerical or I/O failures.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace permqfi::cli

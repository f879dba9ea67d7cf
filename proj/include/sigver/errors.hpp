#pragma once

#include <stdexcept>
#include <string>

namespace sigver {

// Invalid parameter combinations (bad p, C, d, ...). CLI maps these to exit 1.
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Bad data content: parse failures, contract violations, missing users,
// corrupt models, degenerate graphs.
struct data_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Filesystem problems (missing file, unwritable path).
struct io_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace sigver

#pragma once

namespace sigver {

// Dispatches gendata | enroll | verify | evaluate | sweep.
// Exit codes: 0 success, 1 domain error, 2 usage error.
int run_cli(int argc, const char* const* argv);

} // namespace sigver

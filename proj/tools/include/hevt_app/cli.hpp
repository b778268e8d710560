#pragma once

#include <iosfwd>

namespace hevt::app {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitNumerical = 4;

// Full command line, including argv[0]. Progress goes to `out`; failures are
// written to `err` as a one-line JSON object.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace hevt::app

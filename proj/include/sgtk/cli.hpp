#pragma once

#include <string>
#include <vector>

namespace sgtk {

/// Entry point shared by the `sgtk` binary and the CLI tests.
/// Exit codes: 0 success, 1 verification failure, 2 usage/input error.
int cli_main(const std::vector<std::string>& args);

}  // namespace sgtk

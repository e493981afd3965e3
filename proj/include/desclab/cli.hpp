#pragma once

#include <string>
#include <vector>

namespace desclab {

// exit code: 0 success, 1 failed verification checks, 2 usage errors
int cli_main(const std::vector<std::string>& args);

} // namespace desclab

#pragma once

#include <string>
#include <vector>

namespace tsal::cli {

// Exit status: 0 on success, 2 on a usage error, 1 when the work fails.
int run(int argc, char** argv);
int run(const std::vector<std::string>& args);

}  // namespace tsal::cli

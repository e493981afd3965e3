#include <string>
#include <vector>

#include "desclab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return desclab::cli_main(args);
}

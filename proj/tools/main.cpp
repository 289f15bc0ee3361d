#include <vector>

#include "hkfloer/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return hkfloer::run_cli(args);
}

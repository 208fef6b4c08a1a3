#include <vector>

#include "stpp/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return stpp::run_cli(args);
}

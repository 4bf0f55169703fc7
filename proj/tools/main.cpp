#include <vector>

#include "bkmr/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bkmr::cli::run(args);
}

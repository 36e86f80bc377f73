#include <iostream>
#include <string>
#include <vector>

#include "cvmimo/cli/app.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return cvmimo::execute(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "engset/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return engset::cli::run(args, std::cout, std::cerr);
}

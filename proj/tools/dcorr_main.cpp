#include <iostream>
#include <string>
#include <vector>

#include "dcorr/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv, argv + argc);
    return dcorr::cli::run(args, std::cout, std::cerr);
}

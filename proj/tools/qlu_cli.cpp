#include <iostream>

#include "qlu/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return qlu::cli::run(args, std::cout, std::cerr);
}

#include <iostream>

#include "hyperres/cli/cli.hpp"

int main(int argc, char** argv)
{
    return hyperres::run_cli({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}

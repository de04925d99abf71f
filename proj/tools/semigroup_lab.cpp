#include <iostream>

#include "semigroup/cli.hpp"

int main(int argc, char** argv)
{
    return semigroup::run_cli(argc, argv, std::cout, std::cerr);
}

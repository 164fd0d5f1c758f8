#include <iostream>

#include "pemscl/cli.hpp"

int main(int argc, char** argv) {
    return pemscl::cli_main(argc, argv, std::cout, std::cerr);
}

#include <iostream>

#include "cost/cli.hpp"

int main(int argc, char** argv) {
    return cost::cli::run(argc, argv, std::cout, std::cerr);
}

#include "orbitlab/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return orbitlab::cli::run(argc, argv, std::cout, std::cerr); }

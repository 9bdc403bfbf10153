#include <iostream>

#include "sigt/cli/commands.hpp"

int main(int argc, char** argv) { return sigt::cli::run(argc, argv, std::cout, std::cerr); }

#include "pcopt/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pcopt::cli_main(argc, argv, std::cout, std::cerr); }

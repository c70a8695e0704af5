#include <iostream>

#include "whichway/cli.hpp"

int main(int argc, char** argv) { return whichway::cli::run_cli(argc, argv, std::cout, std::cerr); }

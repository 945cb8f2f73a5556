#include <iostream>

#include "ddf/cli/cli.hpp"

int main(int argc, char** argv) { return ddf::cli::cli_main(argc, argv, std::cout, std::cerr); }

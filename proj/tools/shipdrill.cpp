#include <iostream>

#include "shipdrill/cli.hpp"

int main(int argc, char** argv) { return shipdrill::cli::main(argc, argv, std::cout, std::cerr); }

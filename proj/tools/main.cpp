#include <iostream>

#include "sirl/cli.hpp"

int main(int argc, char** argv) { return sirl::cli::main(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "swarmdim/cli.hpp"

int main(int argc, char** argv) { return swarmdim::run_cli(argc, argv, std::cout, std::cerr); }

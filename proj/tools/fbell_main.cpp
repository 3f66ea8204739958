#include <iostream>

#include "fbell/cli.hpp"

int main(int argc, char** argv) { return fbell::run_cli(argc, argv, std::cout, std::cerr); }

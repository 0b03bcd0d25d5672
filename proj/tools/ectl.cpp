#include <iostream>

#include "ectl/cli.hpp"

int main(int argc, char** argv) { return ectl::run_cli(argc, argv, std::cout, std::cerr); }

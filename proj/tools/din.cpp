#include <iostream>

#include "din/cli.hpp"

int main(int argc, char** argv) { return din::run_cli(argc, argv, std::cout, std::cerr); }

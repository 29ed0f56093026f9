#include <iostream>

#include "cfmac/cli.hpp"

int main(int argc, char** argv) { return cfmac::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "krk/cli.hpp"

int main(int argc, char** argv) { return krk::run_cli(argc, argv, std::cin, std::cout, std::cerr); }

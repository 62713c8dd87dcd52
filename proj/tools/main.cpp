#include <iostream>

#include "regchrom/cli.hpp"

int main(int argc, char** argv) { return regchrom::run_cli(argc, argv, std::cout, std::cerr); }

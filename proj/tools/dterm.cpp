#include <iostream>

#include "dterm/cli.hpp"

int main(int argc, char** argv) { return dterm::run_cli(argc, argv, std::cout, std::cerr); }

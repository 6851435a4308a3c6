#include <iostream>

#include "wsu/cli.hpp"

int main(int argc, char** argv) { return wsu::run_cli(argc, argv, std::cout, std::cerr); }

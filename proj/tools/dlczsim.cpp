#include <iostream>

#include "dlcz/cli.hpp"

int main(int argc, char** argv) { return dlcz::run_cli(argc, argv, std::cout, std::cerr); }

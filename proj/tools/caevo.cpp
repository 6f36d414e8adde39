#include <iostream>

#include "caevo/cli.hpp"

int main(int argc, char** argv) { return caevo::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "scmm/cli.hpp"

int main(int argc, char** argv) { return scmm::run_cli(argc, argv, std::cout, std::cerr); }

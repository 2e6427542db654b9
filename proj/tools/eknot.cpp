#include "eknot/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return eknot::run_cli(argc, argv, std::cout, std::cerr); }

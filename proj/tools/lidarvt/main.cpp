#include <iostream>

#include "lidarvt/cli.hpp"

int main(int argc, char** argv) { return lidarvt::run_cli(argc, argv, std::cout, std::cerr); }

#include "idl/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return idl::run_cli(argc, argv, std::cout, std::cerr); }

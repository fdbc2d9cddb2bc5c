#include <iostream>

#include "sfpl/cli.hpp"

int main(int argc, char** argv) { return sfpl::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "bcross/cli.hpp"

int main(int argc, char** argv) { return bcross::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "cubeseek/cli.hpp"

int main(int argc, char** argv) { return cubeseek::cli::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "codesim/cli.hpp"

int main(int argc, char** argv) { return codesim::run(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "opshift/cli.hpp"

int main(int argc, char** argv) { return opshift::cli::run(argc, argv, std::cout, std::cerr); }

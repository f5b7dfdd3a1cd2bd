#include <iostream>

#include "freetorus/cli.hpp"

int main(int argc, char** argv) { return freetorus::cli::run(argc, argv, std::cin, std::cout, std::cerr); }

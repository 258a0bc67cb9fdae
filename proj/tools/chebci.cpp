#include <iostream>

#include "chebci/cli.hpp"

int main(int argc, char** argv) { return chebci::cli::run(argc, argv, std::cout, std::cerr); }

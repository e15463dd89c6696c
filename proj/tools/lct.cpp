#include <iostream>

#include "lct/cli.hpp"

int main(int argc, char** argv) { return lct::cli::run(argc, argv, std::cout, std::cerr); }

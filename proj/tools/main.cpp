#include <iostream>

#include "trivar/cli.hpp"

int main(int argc, char** argv) { return trivar::cli::run(argc, argv, std::cout, std::cerr); }

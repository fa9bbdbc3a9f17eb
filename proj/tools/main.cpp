#include <iostream>

#include "balmatch/cli.hpp"

int main(int argc, char** argv) { return balmatch::run_main(argc, argv, std::cout, std::cerr); }

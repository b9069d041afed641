#include <iostream>

#include "seqfdr/cli.hpp"

int main(int argc, char** argv) { return seqfdr::cli::main(argc, argv, std::cout, std::cerr); }

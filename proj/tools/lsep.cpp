#include <iostream>

#include "lsep/cli/run.hpp"

int main(int argc, char** argv) { return lsep::cli::main_entry(argc, argv, std::cout, std::cerr); }

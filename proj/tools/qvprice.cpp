#include <iostream>

#include "qv/cli.hpp"

int main(int argc, char** argv) { return qv::cli::main_entry(argc, argv, std::cout, std::cerr); }

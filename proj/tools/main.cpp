#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) { return pfs::cli::cli_main(argc, argv, std::cout, std::cerr); }

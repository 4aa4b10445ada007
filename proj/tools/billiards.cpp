#include <iostream>

#include "conebill/cli/commands.hpp"

int main(int argc, char** argv) { return conebill::cli::run_cli(argc, argv, std::cout, std::cerr); }

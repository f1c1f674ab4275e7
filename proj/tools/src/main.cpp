#include <iostream>

#include "starsql/cli/commands.hpp"

int main(int argc, char** argv) { return starsql::cli::run(argc, argv, std::cout, std::cerr); }

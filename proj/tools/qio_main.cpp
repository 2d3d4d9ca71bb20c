#include <iostream>

#include "qio/cli.hpp"

int main(int argc, char** argv) { return qio::cli::run(argc, argv, std::cout, std::cerr); }

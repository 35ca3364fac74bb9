#include <iostream>

#include "quitsolve/cli.hpp"

int main(int argc, char** argv) { return quitsolve::cli::run(argc, argv, std::cout, std::cerr); }

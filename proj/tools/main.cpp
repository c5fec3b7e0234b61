#include <iostream>

#include "qbent/cli.hpp"

int main(int argc, char** argv) { return qbent::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "torrank/cli.hpp"

int main(int argc, char** argv) { return torrank::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "proxcert/cli.hpp"

int main(int argc, char** argv) { return proxcert::run_cli(argc, argv, std::cout, std::cerr); }

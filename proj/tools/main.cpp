#include <iostream>

#include "quncert/cli.hpp"

int main(int argc, char** argv) { return quncert::cli_main(argc, argv, std::cout, std::cerr); }

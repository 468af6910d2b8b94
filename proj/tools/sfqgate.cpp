#include "sfqgate/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return sfq::run_cli(argc, argv, std::cout, std::cerr); }

#include <iostream>

#include "geogate/cli.hpp"

int main(int argc, char** argv) { return geogate::cli::run(argc, argv, std::cout, std::cerr); }

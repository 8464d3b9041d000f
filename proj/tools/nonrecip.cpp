#include <iostream>

#include "nonrecip/commands.hpp"

int main(int argc, char** argv) { return nonrecip::run_cli(argc, argv, std::cout, std::cerr); }

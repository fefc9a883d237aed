#include <iostream>

#include "ontoalign/commands.hpp"

int main(int argc, char** argv) { return ontoalign::run_cli(argc, argv, std::cout, std::cerr); }

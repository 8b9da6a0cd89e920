#include <iostream>

#include "secantboost/commands.hpp"

int main(int argc, char** argv) { return secantboost::cli_main(argc, argv, std::cout, std::cerr); }

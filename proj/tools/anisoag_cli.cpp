#include <iostream>

#include "anisoag/cli.hpp"

int main(int argc, char** argv) { return anisoag::run(argc, argv, std::cout, std::cerr); }

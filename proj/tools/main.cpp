#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return tf::cli::run(argc, argv, std::cout, std::cerr); }

#include "boostsmooth/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return boostsmooth::cli::run(argc, argv, std::cout, std::cerr);
}

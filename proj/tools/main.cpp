#include <iostream>

#include "collusion/cli.hpp"

int main(int argc, char** argv) {
  return collusion::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

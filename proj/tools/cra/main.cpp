#include <iostream>

#include "cra/cli.hpp"

int main(int argc, char** argv) {
  return cra::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}

#include <iostream>

#include "mcint/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return mcint::cli::execute(args, std::cout, std::cerr);
}

#include <iostream>

#include "bf/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return bf::run_cli(args, std::cin, std::cout, std::cerr);
}

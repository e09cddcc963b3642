#include <iostream>
#include <string>
#include <vector>

#include "cli/config.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return footprint::cli::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "greentune/cli/commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return greentune::cli::run_cli(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "supercrit/cli_commands.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return supercrit::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "anchorrefine/cli/commands.h"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return anchorrefine::cli::RunCli(args, std::cout, std::cerr);
}

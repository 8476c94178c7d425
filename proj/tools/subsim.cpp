#include <iostream>
#include <string>
#include <vector>

#include "subsim/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return subsim::cli::run(args, std::cout, std::cerr);
}

#include <iostream>
#include <string>
#include <vector>

#include "fatigue/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return fatigue::cli::run(args, std::cout, std::cerr);
}

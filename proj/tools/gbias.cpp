#include <iostream>
#include <string>
#include <vector>

#include "gbias/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return gbias::cli::run(args, std::cout, std::cerr);
}

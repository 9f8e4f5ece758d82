#include <iostream>
#include <string>
#include <vector>

#include "digestweaver/cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return digestweaver::cli::run(args, std::cout, std::cerr);
}

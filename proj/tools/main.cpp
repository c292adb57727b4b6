#include <iostream>
#include <string>
#include <vector>

#include "ssp_cli.hpp"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv + 1, argv + argc);
  return ssp::cli::run(args, std::cout, std::cerr);
}

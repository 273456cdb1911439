#include <iostream>
#include <vector>

#include "devmodal/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return devmodal::cli::run_cli(args, std::cout, std::cerr);
}

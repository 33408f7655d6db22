#include <iostream>
#include <string>
#include <vector>

#include "jargon/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return jargon::run_cli(args, std::cout, std::cerr);
}

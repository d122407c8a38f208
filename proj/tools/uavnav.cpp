#include <iostream>
#include <string>
#include <vector>

#include "uavnav/cli/cli.h"

int main(int argc, char** argv) {
  const std::vector<std::string> args(argv, argv + argc);
  return uavnav::cli::run(args, std::cout, std::cerr);
}

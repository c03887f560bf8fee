#include <iostream>
#include <string>
#include <vector>

#include "cpmi/run.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cpmi::run(args, std::cout, std::cerr);
}

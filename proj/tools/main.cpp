#include <iostream>
#include <string>
#include <vector>

#include "volspec/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return volspec::dispatch(args, std::cout, std::cerr);
}

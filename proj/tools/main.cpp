#include <iostream>

#include "ruleproof/cli.hpp"

int main(int argc, char** argv) {
  std::ios::sync_with_stdio(false);
  return ruleproof::run_command({argv + 1, argv + argc}, std::cin, std::cout, std::cerr);
}
